#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "kernel.hpp"

using namespace koop;

namespace {

Mat random_points(int d, int n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat p(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) p(i, j) = u(rng);
  return p;
}

// Independent brute-force implementation of the bandwidth scan.
double tune_oracle(const Mat& points) {
  const int n = static_cast<int>(points.cols());
  std::vector<double> logs_s, logs_e;
  for (double i = -40.0; i <= 40.0 + 1e-9; i += 0.25) {
    const double eps = std::pow(2.0, i);
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        s += std::exp(-(points.col(a) - points.col(b)).squaredNorm() / eps);
    logs_s.push_back(std::log(s / (double(n) * n)));
    logs_e.push_back(i * std::log(2.0));
  }
  double best_slope = -1.0, best = 0.0;
  for (size_t i = 1; i + 1 < logs_s.size(); ++i) {
    const double slope =
        (logs_s[i + 1] - logs_s[i - 1]) / (logs_e[i + 1] - logs_e[i - 1]);
    if (slope > best_slope) {
      best_slope = slope;
      best = std::exp(logs_e[i]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("gaussian and covariance kernel evaluations") {
  Vec a(2), b(2);
  a << 1.0, 2.0;
  b << 4.0, 6.0;
  CHECK(eval_gaussian(a, b, 5.0) == doctest::Approx(std::exp(-25.0 / 5.0)).epsilon(1e-15));
  CHECK(eval_gaussian(a, a, 5.0) == 1.0);
  CHECK(eval_covariance(a, b) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_gaussian(a, b, 0.0), std::invalid_argument);
  Vec c(3);
  c.setZero();
  CHECK_THROWS_AS(eval_gaussian(a, c, 1.0), std::invalid_argument);
}

TEST_CASE("two-point markov normalization closed form") {
  Mat pts(1, 2);
  pts << 0.0, 1.0;
  const double eps = 0.7;
  const double k = std::exp(-1.0 / eps);
  GramOperator gram(pts, KernelSpec::from_name("markov-gaussian", eps));

  // By symmetry rho_1 = rho_2 = (1+k)/2, sigma = 1, sigma_hat = sqrt(rho).
  const double rho = (1.0 + k) / 2.0;
  CHECK(gram.rho()[0] == doctest::Approx(rho).epsilon(1e-15));
  CHECK(gram.sigma()[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gram.sigma_hat()[1] == doctest::Approx(std::sqrt(rho)).epsilon(1e-14));
  CHECK(gram.entry(0, 0) == doctest::Approx(1.0 / rho).epsilon(1e-14));
  CHECK(gram.entry(0, 1) == doctest::Approx(k / rho).epsilon(1e-14));
}

TEST_CASE("markov row means of the non-symmetric kernel are exactly one") {
  const Mat pts = random_points(3, 40, 11);
  GramOperator gram(pts, KernelSpec::from_name("markov-gaussian", 0.8));
  const int n = gram.size();
  for (int i = 0; i < n; ++i) {
    // p(x,y) = k(x,y) / (sigma(x) rho(y)); reconstruct raw k from the
    // normalized entries.
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double raw = gram.entry(i, j) * gram.sigma_hat()[i] * gram.sigma_hat()[j];
      acc += raw / (gram.sigma()[i] * gram.rho()[j]);
    }
    CHECK(std::abs(acc / n - 1.0) < 1e-13);
  }
}

TEST_CASE("bandwidth autotuning matches a brute-force scan") {
  const Mat pts = random_points(2, 120, 3);
  CHECK(tune_bandwidth(pts) == doctest::Approx(tune_oracle(pts)).epsilon(1e-12));
}

TEST_CASE("bandwidth autotuning rejects degenerate data") {
  Mat pts = Mat::Zero(2, 10);
  CHECK_THROWS_AS(tune_bandwidth(pts), std::invalid_argument);
  Mat one = random_points(2, 1, 5);
  CHECK_THROWS_AS(tune_bandwidth(one), std::invalid_argument);
}

TEST_CASE("bandwidth subsampling is a uniform stride") {
  // With fewer points than the cap, subsampling must be a no-op.
  const Mat pts = random_points(2, 50, 7);
  CHECK(tune_bandwidth(pts, 1024) == tune_bandwidth(pts, 50));
}

TEST_CASE("covariance kernel scales quadratically with the data") {
  const Mat pts = random_points(3, 20, 9);
  GramOperator g1(pts, KernelSpec::from_name("covariance", 0.0));
  GramOperator g2(2.0 * pts, KernelSpec::from_name("covariance", 0.0));
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      CHECK(g2.entry(i, j) == doctest::Approx(4.0 * g1.entry(i, j)).epsilon(1e-14));
}

TEST_CASE("dense and matrix-free paths agree bitwise") {
  const Mat pts = random_points(3, 30, 17);
  const KernelSpec spec = KernelSpec::from_name("markov-gaussian", 0.5);
  GramOperator dense(pts, spec);
  GramOperator lazy(pts, spec, /*dense_threshold=*/0);
  CHECK(dense.is_dense());
  CHECK(!lazy.is_dense());

  CHECK((dense.rho() - lazy.rho()).norm() == 0.0);
  CHECK((dense.sigma_hat() - lazy.sigma_hat()).norm() == 0.0);
  for (int i = 0; i < 30; ++i) CHECK((dense.row(i) - lazy.row(i)).norm() == 0.0);

  // apply() may use a blocked matrix product on the dense path, so only
  // near-exact agreement is required there.
  const Vec f = random_points(1, 30, 23).transpose();
  CHECK((dense.apply(f) - lazy.apply(f)).norm() < 1e-14 * f.norm());
  CHECK(dense.fingerprint() == lazy.fingerprint());
}

TEST_CASE("kernel_vector at a sample point reproduces the stored row exactly") {
  const Mat pts = random_points(4, 25, 31);
  for (const char* name : {"gaussian", "markov-gaussian"}) {
    GramOperator gram(pts, KernelSpec::from_name(name, 0.9));
    for (int i : {0, 7, 24}) {
      const Vec kv = gram.kernel_vector(Vec(pts.col(i)));
      const Vec row = gram.row(i);
      CHECK((kv - row).norm() == 0.0);
    }
  }
}

TEST_CASE("normalized markov operator is symmetric positive semidefinite") {
  const Mat pts = random_points(2, 60, 41);
  GramOperator gram(pts, KernelSpec::from_name("markov-gaussian", 0.6));
  const Mat& k = *gram.dense();
  CHECK((k - k.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(k / 60.0);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("fingerprint tracks kernel parameters and data") {
  const Mat pts = random_points(2, 15, 51);
  GramOperator a(pts, KernelSpec::from_name("gaussian", 0.5));
  GramOperator b(pts, KernelSpec::from_name("gaussian", 0.6));
  GramOperator c(pts, KernelSpec::from_name("markov-gaussian", 0.5));
  Mat pts2 = pts;
  pts2(0, 0) += 1e-12;
  GramOperator d(pts2, KernelSpec::from_name("gaussian", 0.5));
  CHECK(a.fingerprint() != b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
  CHECK(a.fingerprint() != d.fingerprint());
  GramOperator a2(pts, KernelSpec::from_name("gaussian", 0.5));
  CHECK(a.fingerprint() == a2.fingerprint());
}
