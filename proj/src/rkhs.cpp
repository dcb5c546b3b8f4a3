#include "rkhs.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace koop {

FrequencyGrid FrequencyGrid::dft(int n, double dt) {
  if (n < 1) throw std::invalid_argument("frequency grid needs n >= 1");
  if (dt <= 0.0) throw std::invalid_argument("sampling interval must be positive");
  FrequencyGrid g;
  g.n = n;
  g.dt = dt;
  g.omegas.resize(n);
  const double base = 2.0 * M_PI / (n * dt);
  for (int i = 0; i < n; ++i) g.omegas[i] = base * g.r_of_index(i);
  return g;
}

CVec fourier_function(double omega, int n, double dt) {
  CVec f(n);
  for (int m = 0; m < n; ++m) {
    const double phase = omega * m * dt;
    f[m] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return f;
}

CMat coeffs_fft(const SpectralBasis& basis, const FrequencyGrid& grid) {
  const int n = basis.n;
  if (grid.n != n) throw std::invalid_argument("grid/basis size mismatch");
  const int l = basis.l();

  CMat out(n, l);
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  if (!plan) {
    fftw_free(buf);
    throw std::runtime_error("fftw plan creation failed");
  }

  const int r_min = grid.r_min();
  const int r_max = r_min + n - 1;
  for (int j = 0; j < l; ++j) {
    const double inv_sqrt_lambda = 1.0 / std::sqrt(basis.lambdas[j]);
    for (int m = 0; m < n; ++m) {
      buf[m][0] = basis.phi(m, j) * inv_sqrt_lambda;
      buf[m][1] = 0.0;
    }
    fftw_execute(plan);
    // FFTW index p corresponds to r = p for p <= r_max, else r = p - n.
    const double scale = 1.0 / n;
    for (int p = 0; p < n; ++p) {
      const int r = p <= r_max ? p : p - n;
      out(grid.index_of_r(r), j) =
          std::complex<double>(buf[p][0] * scale, buf[p][1] * scale);
    }
  }

  fftw_destroy_plan(plan);
  fftw_free(buf);
  return out;
}

double NormTable::w_at(int freq_index, int l) const {
  if (l < 1 || l > static_cast<int>(lambdas.size()))
    throw std::invalid_argument("truncation level out of range");
  double acc = 0.0;
  for (int j = 0; j < l; ++j) acc += coeff_power(freq_index, j) / lambdas[j];
  return acc;
}

NormTable norm_table(const SpectralBasis& basis, const FrequencyGrid& grid,
                     const std::vector<int>& truncations) {
  const int l = basis.l();
  for (int t : truncations)
    if (t < 1 || t > l)
      throw std::invalid_argument("truncation level out of range: " +
                                  std::to_string(t));

  NormTable table;
  table.grid = grid;
  table.truncations = truncations;
  table.lambdas = basis.lambdas;

  // coeffs_fft rows already carry the lambda^{-1/2} weight, so
  // |<phi_j, f_omega>|^2 = lambda_j * |b_r|^2 and each norm term is
  // |b_r|^2 itself. Store the raw coefficient power to allow re-evaluation
  // at arbitrary truncation levels.
  const CMat b = coeffs_fft(basis, grid);
  const int nf = grid.n;
  table.coeff_power.resize(nf, l);
  for (int j = 0; j < l; ++j)
    for (int r = 0; r < nf; ++r)
      table.coeff_power(r, j) = std::norm(b(r, j)) * basis.lambdas[j];

  table.w.resize(nf, static_cast<int>(truncations.size()));
  // Cumulative sums over j, sampled at the requested truncations (which are
  // visited in sorted order but reported in the caller's order).
  std::vector<int> order(truncations.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b2) { return truncations[a] < truncations[b2]; });
  for (int r = 0; r < nf; ++r) {
    double acc = 0.0;
    int j = 0;
    for (int oi : order) {
      const int t = truncations[oi];
      for (; j < t; ++j) acc += table.coeff_power(r, j) / basis.lambdas[j];
      table.w(r, oi) = acc;
    }
  }
  return table;
}

NystromFunction nystrom_extend(const SpectralBasis& basis, const CVec& f, int l,
                               double omega) {
  const int n = basis.n;
  if (f.size() != n) throw std::invalid_argument("sampled function length mismatch");
  if (l < 1 || l > basis.l())
    throw std::invalid_argument("truncation level out of range");

  NystromFunction h;
  h.omega = omega;
  h.l = l;
  h.n = n;

  // a_j = <phi_j, f>_{mu_N} = (1/N) phi_j^T f; then c = Phi_l (a ./ lambda),
  // so that (1/N) sum_n k(x, x_n) c_n is the Nystrom extension of the
  // truncated expansion.
  CVec a = (basis.phi.leftCols(l).transpose() * f) / static_cast<double>(n);
  CVec scaled(l);
  h.rkhs_norm_sq = 0.0;
  for (int j = 0; j < l; ++j) {
    scaled[j] = a[j] / basis.lambdas[j];
    h.rkhs_norm_sq += std::norm(a[j]) / basis.lambdas[j];
  }
  h.coeffs = basis.phi.leftCols(l) * scaled;
  return h;
}

std::complex<double> evaluate(const NystromFunction& h, const GramOperator& gram,
                              const Vec& x) {
  if (gram.size() != h.n) throw std::invalid_argument("operator/function size mismatch");
  const Vec kv = gram.kernel_vector(x);
  // Plain loop so that evaluating at a sample point reproduces the in-sample
  // value exactly (same arithmetic as GramOperator::apply row products).
  std::complex<double> acc(0.0, 0.0);
  for (int m = 0; m < h.n; ++m) acc += kv[m] * h.coeffs[m];
  return acc / static_cast<double>(h.n);
}

}  // namespace koop
