// Brute-force renewal moments by truncated enumeration over the latent
// geometric variables, with certified truncation bounds.
#pragma once

#include <cstdint>

#include "aoi/core.hpp"

namespace aoi {

struct TruncatedMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  /// Certified relative bound on the neglected tail, max over both moments.
  double truncation_error_bound = 0.0;
  /// Number of lattice points summed.
  std::uint64_t terms = 0;
};

/// Hard cap on the range of any enumerated variable.
inline constexpr std::uint64_t kOracleRangeCap = 100'000;

/// E[T] and E[T^2] for P1, F1, B0 and AA1 by direct summation over
/// (I_A, I_B) or (I_A1, N, sum of the later I_A), extending the ranges until
/// the certified tail bound is below tol.  Throws std::invalid_argument for
/// bad inputs and std::runtime_error when the cap is hit.
TruncatedMoments enum_renewal_moments(Scheme scheme, double q, double lambda, std::uint64_t tau, double tol);

}  // namespace aoi
