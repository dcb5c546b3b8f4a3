#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace koop {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

enum class KernelFamily { Gaussian, Covariance, MarkovGaussian };

struct KernelSpec {
  KernelFamily family = KernelFamily::MarkovGaussian;
  double epsilon = 0.0;  // Gaussian bandwidth; ignored for covariance

  static KernelSpec from_name(const std::string& name, double epsilon);
  std::string name() const;
};

double eval_gaussian(const Vec& y1, const Vec& y2, double epsilon);
double eval_covariance(const Vec& y1, const Vec& y2);

// Bandwidth autotuning: maximizes d log S / d log eps of the kernel sum
// S(eps) = (1/N^2) sum_{m,n} exp(-d^2(x_m, x_n) / eps) over the dyadic
// grid eps = 2^i, i in [-40, 40] step 0.25. Points beyond max_points are
// subsampled uniformly.
double tune_bandwidth(const Mat& points, int max_points = 1024);

// The sampled kernel integral operator G_N:
//   (G_N f)(x_m) = (1/N) sum_n k(x_m, x_n) f(x_n).
// Dense storage below the threshold, row-recomputing matrix-free above.
// Markov-Gaussian kernels are normalized at construction per
//   p_hat(x,y) = k(x,y) / (sigma_hat(x) sigma_hat(y)),
//   sigma_hat = sqrt(sigma * rho), rho = K_N(1), sigma = K_N(1/rho).
class GramOperator {
 public:
  static constexpr int kDefaultDenseThreshold = 12000;

  GramOperator(Mat points, KernelSpec spec,
               int dense_threshold = kDefaultDenseThreshold);

  int size() const { return static_cast<int>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }
  bool is_dense() const { return dense_.has_value(); }
  const KernelSpec& spec() const { return spec_; }
  const Mat& points() const { return points_; }
  const Mat* dense() const { return dense_ ? &*dense_ : nullptr; }

  bool is_markov() const { return spec_.family == KernelFamily::MarkovGaussian; }
  const Vec& rho() const { return rho_; }
  const Vec& sigma() const { return sigma_; }
  const Vec& sigma_hat() const { return sigma_hat_; }

  // Normalized kernel entry / row at sample points.
  double entry(int i, int j) const;
  Vec row(int i) const;

  Vec apply(const Vec& f) const;
  CVec apply(const CVec& f) const;

  // Normalized kernel section k(x, x_n) at an arbitrary point; for the
  // Markov family, sigma_hat(x) is computed on the fly.
  Vec kernel_vector(const Vec& x) const;

  std::uint64_t fingerprint() const;

 private:
  double raw_entry(int i, int j) const;
  Vec raw_row(int i) const;

  Mat points_;
  KernelSpec spec_;
  std::optional<Mat> dense_;
  Vec rho_, sigma_, sigma_hat_;  // markov normalization, else empty
};

}  // namespace koop
