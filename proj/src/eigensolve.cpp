#include "eigensolve.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

namespace koop {

namespace {

constexpr double kLanczosTol = 1e-10;
constexpr int kMaxRestarts = 300;

// Make the entry of largest magnitude positive in each column and scale
// columns to Euclidean norm sqrt(n).
void fix_columns(Mat& phi) {
  const int n = static_cast<int>(phi.rows());
  for (int j = 0; j < phi.cols(); ++j) {
    int imax = 0;
    phi.col(j).cwiseAbs().maxCoeff(&imax);
    double scale = std::sqrt(static_cast<double>(n)) / phi.col(j).norm();
    if (phi(imax, j) < 0.0) scale = -scale;
    phi.col(j) *= scale;
  }
}

SpectralBasis finalize(const GramOperator& gram, Vec lambdas, Mat phi,
                       int requested_l) {
  // Clamp numerically-negative eigenvalues and apply the lambda floor.
  const double lambda0 = lambdas.size() > 0 ? std::max(lambdas[0], 0.0) : 0.0;
  const double floor = kLambdaFloorRel * lambda0;
  int keep = 0;
  while (keep < lambdas.size() && lambdas[keep] > floor) ++keep;

  SpectralBasis basis;
  basis.n = gram.size();
  basis.truncated = keep < requested_l;
  if (basis.truncated)
    std::fprintf(stderr,
                 "warning: requested %d eigenpairs but numerical rank is %d; "
                 "trailing eigenvalues below floor dropped\n",
                 requested_l, keep);
  if (static_cast<int>(lambdas.size()) > keep && keep > 0 &&
      lambdas[keep - 1] - lambdas[keep] <= 1e-9 * std::abs(lambdas[keep - 1]))
    basis.degenerate_boundary = true;

  basis.lambdas = lambdas.head(keep).cwiseMax(0.0);
  basis.phi = phi.leftCols(keep);
  fix_columns(basis.phi);

  basis.residuals.resize(keep);
  for (int j = 0; j < keep; ++j)
    basis.residuals[j] =
        (gram.apply(Vec(basis.phi.col(j))) - basis.lambdas[j] * basis.phi.col(j))
            .norm();
  return basis;
}

SpectralBasis dense_eigenpairs(const GramOperator& gram, int l) {
  const int n = gram.size();
  Mat g = *gram.dense() / n;  // destroyed by LAPACK

  const int want = std::min(l + 1, n);  // one extra for the boundary check
  std::vector<double> w(n);
  Mat z(n, want);
  std::vector<lapack_int> isuppz(2 * std::max(1, want));
  lapack_int m = 0;
  lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, g.data(), n, 0.0, 0.0,
      n - want + 1, n, 0.0, &m, w.data(), z.data(), n, isuppz.data());
  if (info != 0) throw std::runtime_error("dsyevr failed: info=" + std::to_string(info));

  // Ascending from LAPACK; reverse into nonincreasing order.
  Vec lambdas(m);
  Mat phi(n, m);
  for (int j = 0; j < m; ++j) {
    lambdas[j] = w[m - 1 - j];
    phi.col(j) = z.col(m - 1 - j);
  }
  const int keep = std::min<int>(l, m);
  SpectralBasis basis = finalize(gram, lambdas.head(keep), phi.leftCols(keep), l);
  if (m > keep && keep > 0 &&
      lambdas[keep - 1] - lambdas[keep] <= 1e-9 * std::abs(lambdas[keep - 1]))
    basis.degenerate_boundary = true;
  return basis;
}

// Lanczos with full reorthogonalization and locking of converged Ritz
// vectors across restarts.
SpectralBasis lanczos_eigenpairs(const GramOperator& gram, int l,
                                 std::uint64_t seed) {
  const int n = gram.size();
  const int m_max = std::min(2 * l + 16, n);

  Mat locked(n, 0);
  std::vector<double> locked_vals;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec start(n);
  for (int i = 0; i < n; ++i) start[i] = gauss(rng);

  double lambda0_est = 0.0;

  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    const int nlocked = static_cast<int>(locked_vals.size());
    if (nlocked >= l || nlocked >= n) break;
    const int m = std::min(m_max, n - nlocked);

    Mat v(n, m);
    Vec alpha(m), beta(m);  // beta[i] couples v_i and v_{i+1}
    auto orthogonalize = [&](Vec& w, int upto) {
      // Two Gram-Schmidt passes against locked and current basis vectors.
      for (int pass = 0; pass < 2; ++pass) {
        if (locked.cols() > 0) w -= locked * (locked.transpose() * w);
        if (upto > 0)
          w -= v.leftCols(upto) * (v.leftCols(upto).transpose() * w);
      }
    };

    Vec q = start;
    orthogonalize(q, 0);
    double qn = q.norm();
    if (qn < 1e-14) {
      for (int i = 0; i < n; ++i) q[i] = gauss(rng);
      orthogonalize(q, 0);
      qn = q.norm();
    }
    v.col(0) = q / qn;

    int built = 0;
    for (int i = 0; i < m; ++i) {
      Vec w = gram.apply(Vec(v.col(i)));
      alpha[i] = v.col(i).dot(w);
      orthogonalize(w, i + 1);
      built = i + 1;
      beta[i] = w.norm();
      if (i + 1 < m) {
        if (beta[i] < 1e-14) break;  // invariant subspace found
        v.col(i + 1) = w / beta[i];
      }
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
    for (int i = 0; i < built; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < built) {
        t(i, i + 1) = beta[i];
        t(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Vec theta = es.eigenvalues();    // ascending
    const Mat s = es.eigenvectors();
    const double beta_last = built < m ? 0.0 : beta[built - 1];
    lambda0_est = std::max(lambda0_est, theta[built - 1]);

    // Lock converged Ritz pairs, largest first.
    bool any_locked = false;
    for (int j = built - 1; j >= 0; --j) {
      if (static_cast<int>(locked_vals.size()) >= l) break;
      const double resid = std::abs(beta_last * s(built - 1, j));
      const double scale = std::max(std::abs(theta[j]), 1e-30);
      const bool exact_subspace = built + static_cast<int>(locked_vals.size()) >= n ||
                                  beta_last == 0.0;
      if (exact_subspace || resid <= kLanczosTol * std::max(scale, lambda0_est)) {
        Vec y = v.leftCols(built) * s.col(j);
        y.normalize();
        locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
        locked.col(locked.cols() - 1) = y;
        locked_vals.push_back(theta[j]);
        any_locked = true;
      }
    }

    if (static_cast<int>(locked_vals.size()) >= l) break;
    // Restart from the best unconverged Ritz vector, or fresh noise if the
    // sweep stalled.
    if (any_locked || built > 0) {
      start = v.leftCols(built) * s.col(built - 1);
      if (!any_locked)
        for (int i = 0; i < n; ++i) start[i] += 1e-3 * gauss(rng);
    } else {
      for (int i = 0; i < n; ++i) start[i] = gauss(rng);
    }
  }

  if (static_cast<int>(locked_vals.size()) < l)
    throw std::runtime_error(
        "eigensolver did not converge to the requested number of pairs after " +
        std::to_string(kMaxRestarts) + " restarts");

  // Sort locked pairs nonincreasing.
  const int nl = static_cast<int>(locked_vals.size());
  std::vector<int> order(nl);
  for (int i = 0; i < nl; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_vals[a] > locked_vals[b]; });
  Vec lambdas(l);
  Mat phi(n, l);
  for (int j = 0; j < l; ++j) {
    lambdas[j] = locked_vals[order[j]];
    phi.col(j) = locked.col(order[j]);
  }
  return finalize(gram, lambdas, phi, l);
}

}  // namespace

SpectralBasis top_eigenpairs(const GramOperator& gram, int l, std::uint64_t seed) {
  const int n = gram.size();
  if (l < 1 || l > n) throw std::invalid_argument("truncation level out of range");
  if (gram.is_dense()) return dense_eigenpairs(gram, l);
  return lanczos_eigenpairs(gram, l, seed);
}

namespace {
constexpr char kBasisMagic[8] = {'K', 'O', 'O', 'P', 'B', 'A', 'S', '1'};
constexpr std::uint32_t kBasisVersion = 1;
}  // namespace

void save_basis(const std::string& path, const SpectralBasis& basis,
                std::uint64_t kernel_fingerprint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open basis cache for writing: " + path);
  out.write(kBasisMagic, sizeof kBasisMagic);
  const std::uint32_t n = basis.n, l = basis.l();
  out.write(reinterpret_cast<const char*>(&kBasisVersion), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&l), 4);
  out.write(reinterpret_cast<const char*>(&kernel_fingerprint), 8);
  out.write(reinterpret_cast<const char*>(basis.lambdas.data()), 8 * l);
  out.write(reinterpret_cast<const char*>(basis.phi.data()),
            8 * static_cast<std::streamsize>(basis.phi.size()));
  if (!out) throw std::runtime_error("basis cache write failed: " + path);
}

std::optional<SpectralBasis> load_basis(const std::string& path,
                                        std::uint64_t kernel_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0, n = 0, l = 0;
  std::uint64_t fp = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&l), 4);
  in.read(reinterpret_cast<char*>(&fp), 8);
  if (!in || std::memcmp(magic, kBasisMagic, 8) != 0 || version != kBasisVersion ||
      fp != kernel_fingerprint)
    return std::nullopt;
  SpectralBasis basis;
  basis.n = static_cast<int>(n);
  basis.lambdas.resize(l);
  basis.phi.resize(n, l);
  in.read(reinterpret_cast<char*>(basis.lambdas.data()), 8 * l);
  in.read(reinterpret_cast<char*>(basis.phi.data()),
          8 * static_cast<std::streamsize>(basis.phi.size()));
  if (!in) return std::nullopt;
  return basis;
}

}  // namespace koop
