#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace koop {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // one row per record
};

// Numeric CSV with a single header line. Values are written with 17
// significant digits so doubles round-trip exactly.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);
CsvTable read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace koop
