#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "baseline.hpp"

using namespace koop;

namespace {

Mat random_series(int m, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat s(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) s(i, j) = g(rng);
  return s;
}

// Direct-summation oracle for the harmonic average.
Vec harmonic_oracle(const Mat& series, const FrequencyGrid& grid) {
  const int n = grid.n;
  const int m = static_cast<int>(series.rows());
  Vec power(n);
  for (int i = 0; i < n; ++i) {
    const double omega = grid.omegas[i];
    double acc = 0.0;
    for (int c = 0; c < m; ++c) {
      std::complex<double> s(0.0, 0.0);
      for (int t = 0; t < n; ++t)
        s += std::polar(1.0, -omega * t * grid.dt) * series(c, t);
      acc += std::norm(s / double(n));
    }
    power[i] = acc;
  }
  return power;
}

}  // namespace

TEST_CASE("a pure complex tone concentrates all power on its grid line") {
  const int n = 64;
  const double dt = 0.05;
  const auto grid = FrequencyGrid::dft(n, dt);
  const int r = 9;
  CMat series(1, n);
  for (int t = 0; t < n; ++t)
    series(0, t) = std::polar(1.0, grid.omegas[grid.index_of_r(r)] * t * dt);
  const PowerSpectrum ps = harmonic_average(series, grid);
  CHECK(ps.power[grid.index_of_r(r)] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < n; ++i)
    if (i != grid.index_of_r(r)) CHECK(ps.power[i] < 1e-24);
}

TEST_CASE("a constant series has all power at zero frequency") {
  const int n = 32;
  const auto grid = FrequencyGrid::dft(n, 0.01);
  Mat series(3, n);
  series.colwise() = (Vec(3) << 1.0, -2.0, 0.5).finished();
  const PowerSpectrum ps = harmonic_average(series, grid);
  CHECK(ps.power[grid.index_of_r(0)] == doctest::Approx(5.25).epsilon(1e-13));
  CHECK(ps.power.sum() == doctest::Approx(5.25).epsilon(1e-13));
}

TEST_CASE("FFT harmonic average matches direct summation") {
  const int n = 64;
  const auto grid = FrequencyGrid::dft(n, 0.02);
  const Mat series = random_series(3, n, 7);
  const PowerSpectrum ps = harmonic_average(series, grid);
  const Vec oracle = harmonic_oracle(series, grid);
  CHECK((ps.power - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Parseval: total power equals the mean squared norm") {
  for (int n : {63, 128}) {
    const auto grid = FrequencyGrid::dft(n, 0.01);
    const Mat series = random_series(4, n, 100 + n);
    const PowerSpectrum ps = harmonic_average(series, grid);
    const double mean_sq = series.squaredNorm() / n;
    CHECK(ps.power.sum() == doctest::Approx(mean_sq).epsilon(1e-10));
    CHECK(ps.power.minCoeff() >= 0.0);
  }
}

TEST_CASE("rank-1 series: both covariance spectra peak at the tone") {
  const int n = 128;
  const double dt = 0.05;
  const auto grid = FrequencyGrid::dft(n, dt);
  const int r = 13;
  Mat series(1, n);
  for (int t = 0; t < n; ++t)
    series(0, t) = std::cos(grid.omegas[grid.index_of_r(r)] * t * dt);
  const CovarianceBaseline cb = covariance_rkhs_norms(series, grid);
  CHECK(cb.rank == 1);
  int imax_w = 0, imax_p = 0;
  cb.w_rkhs.maxCoeff(&imax_w);
  cb.power.maxCoeff(&imax_p);
  CHECK(std::abs(cb.grid.r_of_index(imax_w)) == r);
  CHECK(std::abs(cb.grid.r_of_index(imax_p)) == r);
}

TEST_CASE("Eq-46 singular-value path equals the FFT harmonic average") {
  for (int n : {100, 513, 1024}) {
    const auto grid = FrequencyGrid::dft(n, 0.01);
    const Mat series = random_series(n >= 513 ? 6 : 3, n, 200 + n);
    const CovarianceBaseline cb = covariance_rkhs_norms(series, grid);
    const PowerSpectrum ps = harmonic_average(series, grid);
    CHECK((cb.power - ps.power).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rank never exceeds the data dimension") {
  const int n = 200;
  const auto grid = FrequencyGrid::dft(n, 0.01);
  Mat series = random_series(2, n, 17);
  Mat stacked(4, n);
  stacked.topRows(2) = series;
  stacked.bottomRows(2) = 3.0 * series;  // linearly dependent rows
  const CovarianceBaseline cb = covariance_rkhs_norms(stacked, grid);
  CHECK(cb.rank == 2);
  CHECK_THROWS_AS(covariance_rkhs_norms(Mat::Zero(2, n), grid), std::invalid_argument);
}

TEST_CASE("both spectra are invariant under data-space rotations") {
  const int n = 256;
  const auto grid = FrequencyGrid::dft(n, 0.01);
  const Mat series = random_series(4, n, 23);
  // Random orthogonal matrix from a QR factorization.
  const Mat q = Eigen::HouseholderQR<Mat>(random_series(4, 4, 29)).householderQ();
  const CovarianceBaseline a = covariance_rkhs_norms(series, grid);
  const CovarianceBaseline b = covariance_rkhs_norms(q * series, grid);
  CHECK((a.power - b.power).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.w_rkhs - b.w_rkhs).cwiseAbs().maxCoeff() < 1e-10);
  const PowerSpectrum pa = harmonic_average(series, grid);
  const PowerSpectrum pb = harmonic_average(Mat(q * series), grid);
  CHECK((pa.power - pb.power).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("RKHS weighting favors the weak tone more than raw power does") {
  // Two tones with a 100x amplitude imbalance across two channels. Dividing
  // by the eigenvalues (RKHS norm) restores the weak tone's prominence,
  // multiplying by them (plain power) buries it.
  const int n = 512;
  const double dt = 0.02;
  const auto grid = FrequencyGrid::dft(n, dt);
  const int r_strong = 20, r_weak = 57;
  Mat series(2, n);
  for (int t = 0; t < n; ++t) {
    series(0, t) =
        100.0 * std::cos(grid.omegas[grid.index_of_r(r_strong)] * t * dt);
    series(1, t) = std::cos(grid.omegas[grid.index_of_r(r_weak)] * t * dt);
  }
  const CovarianceBaseline cb = covariance_rkhs_norms(series, grid);
  const int iw = grid.index_of_r(r_weak), is = grid.index_of_r(r_strong);
  const double margin_rkhs = cb.w_rkhs[iw] / cb.w_rkhs[is];
  const double margin_power = cb.power[iw] / cb.power[is];
  CHECK(margin_rkhs > margin_power);
  CHECK(margin_rkhs > 1.0);       // weak tone dominates the RKHS spectrum
  CHECK(margin_power < 1e-2);     // but is buried in the raw power spectrum
}
