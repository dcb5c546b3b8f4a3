#include "embedding.hpp"

#include <stdexcept>

namespace koop {

EmbeddedSeries delay_embed(const Eigen::MatrixXd& series, int delays) {
  const int m = static_cast<int>(series.rows());
  const int n = static_cast<int>(series.cols());
  if (delays < 1) throw std::invalid_argument("delay count must be >= 1");
  if (n < delays) throw std::invalid_argument("series shorter than delay count");

  EmbeddedSeries out;
  out.delays = delays;
  out.source_offset = delays - 1;
  const int n_out = n - delays + 1;
  out.vectors.resize(m * delays, n_out);
  for (int j = 0; j < n_out; ++j)
    for (int q = 0; q < delays; ++q)
      out.vectors.col(j).segment(q * m, m) = series.col(j + delays - 1 - q);
  return out;
}

}  // namespace koop
