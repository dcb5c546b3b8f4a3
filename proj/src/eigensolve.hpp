#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "kernel.hpp"

namespace koop {

// Leading eigenpairs of G_N. Columns of phi are mu_N-orthonormal, i.e.
// Euclidean norm sqrt(N). Eigenvalues sorted nonincreasing; entries below
// 1e-12 * lambda_0 are dropped (see truncated flag).
struct SpectralBasis {
  Vec lambdas;
  Mat phi;  // n x l
  int n = 0;
  int l() const { return static_cast<int>(lambdas.size()); }
  Vec residuals;            // ||G phi_j - lambda_j phi_j||_2 per column
  bool truncated = false;   // requested l exceeded numerical rank
  bool degenerate_boundary = false;  // lambda_{l-1} ~ lambda_l within 1e-9 rel
};

inline constexpr double kLambdaFloorRel = 1e-12;

// Computes the l largest eigenpairs of gram. Dense-storage operators use a
// direct symmetric solver; matrix-free operators use Lanczos iteration with
// full reorthogonalization over gram.apply. Deterministic for a fixed seed.
SpectralBasis top_eigenpairs(const GramOperator& gram, int l,
                             std::uint64_t seed = 0);

// Basis cache. Layout: magic "KOOPBAS1", u32 version, u32 n, u32 l,
// u64 kernel fingerprint, then lambdas and phi (column-major) as 64-bit
// little-endian floats.
void save_basis(const std::string& path, const SpectralBasis& basis,
                std::uint64_t kernel_fingerprint);
std::optional<SpectralBasis> load_basis(const std::string& path,
                                        std::uint64_t kernel_fingerprint);

}  // namespace koop
