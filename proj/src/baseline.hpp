#pragma once

#include "rkhs.hpp"

namespace koop {

// Classical harmonic-averaging estimate: power(r) = || (1/N) sum_n
// exp(-i omega_r n dt) F(x_n) ||^2 over the DFT grid.
struct PowerSpectrum {
  FrequencyGrid grid;
  Vec power;
};

// series is m x N, one column per sample.
PowerSpectrum harmonic_average(const Mat& series, const FrequencyGrid& grid);
PowerSpectrum harmonic_average(const CMat& series, const FrequencyGrid& grid);

// Covariance-kernel spectral decomposition via SVD of the data matrix
// Y / sqrt(N): lambda_j are squared singular values, phi_j right singular
// vectors scaled to mu_N-unit norm, rank limited by the data dimension.
// Both the RKHS-norm spectrum (division by lambda) and the equivalent
// harmonic-average power (multiplication by lambda) are reported.
struct CovarianceBaseline {
  FrequencyGrid grid;
  Vec lambdas;      // squared singular values above the rank cutoff
  int rank = 0;     // numerical rank l_N <= data dimension
  Mat coeff_power;  // grid.n x rank : |<phi_j, f_omega>_{mu_N}|^2
  Vec w_rkhs;       // sum_j coeff_power / lambda_j
  Vec power;        // sum_j coeff_power * lambda_j == harmonic_average power
};

CovarianceBaseline covariance_rkhs_norms(const Mat& series,
                                         const FrequencyGrid& grid);

}  // namespace koop
