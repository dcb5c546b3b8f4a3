#include "kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace koop {

namespace {

// Denormal floor; kernel values this small carry no information.
constexpr double kKernelFloor = 1e-300;
constexpr double kNormFloor = 1e-150;

inline double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

inline double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

inline double gaussian_of_sqdist(double d2, double epsilon) {
  double v = std::exp(-d2 / epsilon);
  return v < kKernelFloor ? 0.0 : v;
}

}  // namespace

KernelSpec KernelSpec::from_name(const std::string& name, double epsilon) {
  KernelSpec s;
  s.epsilon = epsilon;
  if (name == "gaussian")
    s.family = KernelFamily::Gaussian;
  else if (name == "covariance")
    s.family = KernelFamily::Covariance;
  else if (name == "markov-gaussian")
    s.family = KernelFamily::MarkovGaussian;
  else
    throw std::invalid_argument("unknown kernel family: " + name);
  return s;
}

std::string KernelSpec::name() const {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Covariance: return "covariance";
    case KernelFamily::MarkovGaussian: return "markov-gaussian";
  }
  return "?";
}

double eval_gaussian(const Vec& y1, const Vec& y2, double epsilon) {
  if (y1.size() != y2.size()) throw std::invalid_argument("dimension mismatch");
  if (epsilon <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  return gaussian_of_sqdist(sq_dist(y1.data(), y2.data(), static_cast<int>(y1.size())), epsilon);
}

double eval_covariance(const Vec& y1, const Vec& y2) {
  if (y1.size() != y2.size()) throw std::invalid_argument("dimension mismatch");
  return dot(y1.data(), y2.data(), static_cast<int>(y1.size()));
}

double tune_bandwidth(const Mat& points, int max_points) {
  const int n_all = static_cast<int>(points.cols());
  const int d = static_cast<int>(points.rows());
  if (n_all < 2) throw std::invalid_argument("bandwidth tuning needs >= 2 points");

  const int stride = (n_all + max_points - 1) / max_points;
  std::vector<int> idx;
  for (int i = 0; i < n_all; i += stride) idx.push_back(i);
  const int n = static_cast<int>(idx.size());

  std::vector<double> d2;
  d2.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  double d2max = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = sq_dist(points.col(idx[i]).data(), points.col(idx[j]).data(), d);
      d2.push_back(v);
      d2max = std::max(d2max, v);
    }
  if (d2max == 0.0) throw std::invalid_argument("degenerate data: all points identical");

  // S(eps) over the dyadic grid; diagonal terms contribute n.
  const double i_lo = -40.0, i_hi = 40.0, step = 0.25;
  std::vector<double> log_s, log_eps;
  for (double i = i_lo; i <= i_hi + 1e-9; i += step) {
    const double eps = std::pow(2.0, i);
    double acc = 0.0;
    for (double v : d2) acc += std::exp(-v / eps);
    const double s = (static_cast<double>(n) + 2.0 * acc) /
                     (static_cast<double>(n) * static_cast<double>(n));
    log_s.push_back(std::log(s));
    log_eps.push_back(i * std::log(2.0));
  }

  double best_slope = -1.0;
  double best_eps = std::pow(2.0, i_lo);
  for (size_t i = 1; i + 1 < log_s.size(); ++i) {
    const double slope = (log_s[i + 1] - log_s[i - 1]) / (log_eps[i + 1] - log_eps[i - 1]);
    if (slope > best_slope) {
      best_slope = slope;
      best_eps = std::exp(log_eps[i]);
    }
  }
  return best_eps;
}

GramOperator::GramOperator(Mat points, KernelSpec spec, int dense_threshold)
    : points_(std::move(points)), spec_(spec) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("empty point set");
  if (spec_.family != KernelFamily::Covariance && spec_.epsilon <= 0.0)
    throw std::invalid_argument("bandwidth must be positive");

  const bool dense = n <= dense_threshold;
  if (dense) {
    dense_.emplace(n, n);
    Mat& k = *dense_;
    for (int i = 0; i < n; ++i) {
      k(i, i) = raw_entry(i, i);
      for (int j = i + 1; j < n; ++j) {
        const double v = raw_entry(i, j);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
  }

  if (spec_.family == KernelFamily::MarkovGaussian) {
    rho_.resize(n);
    sigma_.resize(n);
    sigma_hat_.resize(n);
    // Row sums mirror the arithmetic of kernel_vector exactly so that
    // out-of-sample evaluation at a sample point reproduces the stored
    // normalization bit-for-bit.
    auto stored_raw_row = [&](int i) -> Vec {
      if (dense) return Vec(dense_->row(i));
      return raw_row(i);
    };
    for (int i = 0; i < n; ++i) {
      rho_[i] = stored_raw_row(i).sum() / n;
      if (rho_[i] <= 0.0) throw std::runtime_error("markov normalization: nonpositive rho");
    }
    for (int i = 0; i < n; ++i)
      sigma_[i] = stored_raw_row(i).cwiseQuotient(rho_).sum() / n;
    for (int i = 0; i < n; ++i) {
      sigma_hat_[i] = std::sqrt(sigma_[i] * rho_[i]);
      if (!(sigma_hat_[i] > kNormFloor))
        throw std::runtime_error("markov normalization: vanishing sigma_hat");
    }
    if (dense) {
      Mat& k = *dense_;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) k(i, j) /= sigma_hat_[i] * sigma_hat_[j];
    }
  }
}

double GramOperator::raw_entry(int i, int j) const {
  const int d = dim();
  switch (spec_.family) {
    case KernelFamily::Covariance:
      return dot(points_.col(i).data(), points_.col(j).data(), d);
    case KernelFamily::Gaussian:
    case KernelFamily::MarkovGaussian:
      return gaussian_of_sqdist(
          sq_dist(points_.col(i).data(), points_.col(j).data(), d), spec_.epsilon);
  }
  return 0.0;
}

Vec GramOperator::raw_row(int i) const {
  const int n = size();
  Vec out(n);
  for (int j = 0; j < n; ++j) out[j] = raw_entry(i, j);
  return out;
}

double GramOperator::entry(int i, int j) const {
  if (dense_) return (*dense_)(i, j);
  double v = raw_entry(i, j);
  if (is_markov()) v /= sigma_hat_[i] * sigma_hat_[j];
  return v;
}

Vec GramOperator::row(int i) const {
  if (dense_) return dense_->row(i);
  Vec r = raw_row(i);
  if (is_markov()) r = (r.array() / (sigma_hat_.array() * sigma_hat_[i])).matrix();
  return r;
}

Vec GramOperator::apply(const Vec& f) const {
  const int n = size();
  if (f.size() != n) throw std::invalid_argument("dimension mismatch in apply");
  if (dense_) return (*dense_ * f) / n;
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = row(i).dot(f) / n;
  return out;
}

CVec GramOperator::apply(const CVec& f) const {
  const int n = size();
  if (f.size() != n) throw std::invalid_argument("dimension mismatch in apply");
  Vec re = apply(Vec(f.real()));
  Vec im = apply(Vec(f.imag()));
  CVec out(n);
  out.real() = re;
  out.imag() = im;
  return out;
}

Vec GramOperator::kernel_vector(const Vec& x) const {
  const int n = size();
  const int d = dim();
  if (x.size() != d) throw std::invalid_argument("point dimension mismatch");
  Vec raw(n);
  for (int j = 0; j < n; ++j) {
    if (spec_.family == KernelFamily::Covariance)
      raw[j] = dot(x.data(), points_.col(j).data(), d);
    else
      raw[j] = gaussian_of_sqdist(sq_dist(x.data(), points_.col(j).data(), d),
                                  spec_.epsilon);
  }
  if (!is_markov()) return raw;
  const double rho_x = raw.sum() / n;
  if (rho_x <= 0.0) throw std::runtime_error("out-of-sample point too far from data");
  const double sigma_x = raw.cwiseQuotient(rho_).sum() / n;
  const double sh_x = std::sqrt(sigma_x * rho_x);
  if (!(sh_x > kNormFloor))
    throw std::runtime_error("out-of-sample point too far from data");
  return (raw.array() / (sigma_hat_.array() * sh_x)).matrix();
}

std::uint64_t GramOperator::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const int fam = static_cast<int>(spec_.family);
  mix(&fam, sizeof fam);
  mix(&spec_.epsilon, sizeof spec_.epsilon);
  mix(points_.data(), sizeof(double) * points_.size());
  return h;
}

}  // namespace koop
