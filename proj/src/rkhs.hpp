#pragma once

#include <complex>
#include <vector>

#include "eigensolve.hpp"
#include "kernel.hpp"

namespace koop {

using CMat = Eigen::MatrixXcd;

// DFT frequency grid omega_r = 2*pi*r / (N*dt). Odd N uses
// r in {-(N-1)/2, ..., (N-1)/2}; even N uses r in {-N/2, ..., N/2-1},
// including the -pi/dt endpoint once.
struct FrequencyGrid {
  double dt = 0.0;
  int n = 0;
  Vec omegas;  // ascending, indexed by r - r_min

  static FrequencyGrid dft(int n, double dt);
  int r_min() const { return -(n / 2); }
  int size() const { return n; }
  int index_of_r(int r) const { return r - r_min(); }
  int r_of_index(int i) const { return i + r_min(); }
  double spacing() const { return 2.0 * M_PI / (n * dt); }
  double nyquist() const { return M_PI / dt; }
};

// f_omega sampled on the trajectory: entry n = exp(i*omega*n*dt).
CVec fourier_function(double omega, int n, double dt);

// A_N = Z_N Lambda^{-1/2} Phi_N: row r holds the DFT coefficients
// b_r = (1/N) sum_n exp(-2*pi*i*n*r/N) lambda_j^{-1/2} phi_j(x_n),
// rows ordered by the grid (r_min..r_max), one column per eigenfunction.
CMat coeffs_fft(const SpectralBasis& basis, const FrequencyGrid& grid);

struct NormTable {
  FrequencyGrid grid;
  std::vector<int> truncations;
  Mat w;            // grid.n x truncations.size()
  Mat coeff_power;  // grid.n x basis.l : |<phi_j, f_omega>|^2
  Vec lambdas;      // eigenvalues, for re-evaluation at other truncations

  // w_{N,l} at an arbitrary truncation level from the cached coefficient
  // powers.
  double w_at(int freq_index, int l) const;
};

NormTable norm_table(const SpectralBasis& basis, const FrequencyGrid& grid,
                     const std::vector<int>& truncations);

// RKHS extension h(x) = (1/N) sum_n k(x, x_n) c_n of a sampled function.
struct NystromFunction {
  CVec coeffs;  // per-sample weights c_n
  double omega = 0.0;
  int l = 0;
  int n = 0;
  double rkhs_norm_sq = 0.0;
};

NystromFunction nystrom_extend(const SpectralBasis& basis, const CVec& f, int l,
                               double omega = 0.0);

std::complex<double> evaluate(const NystromFunction& h, const GramOperator& gram,
                              const Vec& x);

}  // namespace koop
