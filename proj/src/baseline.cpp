#include "baseline.hpp"

#include <fftw3.h>

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace koop {

namespace {

constexpr double kRankCutoffRel = 1e-10;

// DFT of each row of `rows` over the grid: out(r, i) = (1/N) sum_n
// exp(-i omega_r n dt) rows(i, n).
CMat dft_rows(const CMat& rows, const FrequencyGrid& grid) {
  const int n = grid.n;
  const int m = static_cast<int>(rows.rows());
  if (static_cast<int>(rows.cols()) != n)
    throw std::invalid_argument("series length does not match the grid");

  CMat out(n, m);
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  if (!plan) {
    fftw_free(buf);
    throw std::runtime_error("fftw plan creation failed");
  }
  const int r_max = grid.r_min() + n - 1;
  const double scale = 1.0 / n;
  for (int i = 0; i < m; ++i) {
    for (int t = 0; t < n; ++t) {
      buf[t][0] = rows(i, t).real();
      buf[t][1] = rows(i, t).imag();
    }
    fftw_execute(plan);
    for (int p = 0; p < n; ++p) {
      const int r = p <= r_max ? p : p - n;
      out(grid.index_of_r(r), i) =
          std::complex<double>(buf[p][0] * scale, buf[p][1] * scale);
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return out;
}

CMat dft_rows(const Mat& rows, const FrequencyGrid& grid) {
  return dft_rows(CMat(rows.cast<std::complex<double>>()), grid);
}

}  // namespace

PowerSpectrum harmonic_average(const Mat& series, const FrequencyGrid& grid) {
  const CMat f = dft_rows(series, grid);
  PowerSpectrum ps;
  ps.grid = grid;
  ps.power = f.cwiseAbs2().rowwise().sum();
  return ps;
}

PowerSpectrum harmonic_average(const CMat& series, const FrequencyGrid& grid) {
  const CMat f = dft_rows(series, grid);
  PowerSpectrum ps;
  ps.grid = grid;
  ps.power = f.cwiseAbs2().rowwise().sum();
  return ps;
}

CovarianceBaseline covariance_rkhs_norms(const Mat& series,
                                         const FrequencyGrid& grid) {
  const int n = grid.n;
  const int m = static_cast<int>(series.rows());
  if (static_cast<int>(series.cols()) != n)
    throw std::invalid_argument("series length does not match the grid");

  // G_N = B^T B with B = Y / sqrt(N); squared singular values of B are the
  // covariance-kernel eigenvalues and the right singular vectors scale to
  // the mu_N-orthonormal eigenfunctions phi_j = sqrt(N) v_j.
  const Mat b = series / std::sqrt(static_cast<double>(n));
  Eigen::BDCSVD<Mat> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= 0.0)
    throw std::invalid_argument("rank-0 data: all-zero series");

  int rank = 0;
  while (rank < s.size() && s[rank] > kRankCutoffRel * s[0]) ++rank;

  CovarianceBaseline cb;
  cb.grid = grid;
  cb.rank = rank;
  cb.lambdas = s.head(rank).array().square();

  // <phi_j, f_omega>_{mu_N} = (1/N) sum_n phi_j(x_n) conj? phi real; the DFT
  // of phi_j rows gives the conjugate pairing, and only |.|^2 is used.
  Mat phi_rows(rank, n);
  for (int j = 0; j < rank; ++j)
    phi_rows.row(j) = std::sqrt(static_cast<double>(n)) * svd.matrixV().col(j).transpose();
  const CMat coeffs = dft_rows(phi_rows, grid);
  cb.coeff_power = coeffs.cwiseAbs2();

  cb.w_rkhs = cb.coeff_power * cb.lambdas.cwiseInverse();
  cb.power = cb.coeff_power * cb.lambdas;
  return cb;
}

}  // namespace koop
