#include "csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace koop {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  if (static_cast<int>(header.size()) != values.cols())
    throw std::invalid_argument("csv header/column count mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) table.header.push_back(field);
  }
  const size_t ncols = table.header.size();
  if (ncols == 0) throw std::runtime_error("csv has no columns: " + path);

  std::vector<double> data;
  size_t nrows = 0;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    size_t col = 0;
    while (std::getline(ss, field, ',')) {
      size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != field.size() || field.empty())
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": non-numeric field '" + field + "'");
      data.push_back(v);
      ++col;
    }
    if (col != ncols)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(ncols) +
                               " fields, got " + std::to_string(col));
    ++nrows;
  }

  table.values.resize(nrows, ncols);
  for (size_t r = 0; r < nrows; ++r)
    for (size_t c = 0; c < ncols; ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          data[r * ncols + c];
  return table;
}

}  // namespace koop
