#pragma once

#include <Eigen/Dense>

namespace koop {

struct EmbeddedSeries {
  // Columns are delay vectors in R^{m*Q}: newest sample first, then
  // progressively earlier samples.
  Eigen::MatrixXd vectors;  // (m*Q) x (N - Q + 1)
  int delays = 1;
  int source_offset = 0;  // index of the first usable raw sample (= Q - 1)
};

EmbeddedSeries delay_embed(const Eigen::MatrixXd& series, int delays);

}  // namespace koop
