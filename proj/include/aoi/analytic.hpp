// Closed-form renewal moments and average age for every policy.
#pragma once

#include <cstdint>
#include <optional>

#include "aoi/core.hpp"

namespace aoi {

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Moments of a geometric variable with success probability p whose support
/// starts at support_start (0 or 1).
Moments geometric_moments(double p, int support_start);

/// Moments of X = max(tau, I_A) with I_A geometric(q) on {1, 2, ...}.
Moments threshold_wait_moments(double q, std::uint64_t tau);

/// (1 - q)^tau; repeated multiplication up to tau = 64, exp/log1p above.
double pow_one_minus(double q, std::uint64_t tau);

/// E[T], E[T^2] of the renewal interval for P1, F1, B0 and AA1.  tau is
/// required for P1/F1 and must be absent otherwise.
Moments renewal_moments(Scheme scheme, const SystemParams& params, std::optional<std::uint64_t> tau = std::nullopt);

/// Average age for P1, F1, B0, AA1 and AAinf.  AA1, B0 and AAinf use their
/// own displayed formulas rather than the P1/F1 reductions.
double closed_form_aoi(Scheme scheme, const SystemParams& params, std::optional<std::uint64_t> tau = std::nullopt);

struct StationaryBattery {
  double pi0 = 0.0;
  double pi1 = 0.0;
};

/// Post-credit battery distribution of the always-accept unbounded battery
/// (a discrete-time Geo/Geo/1 queue).  Requires q < lambda.
StationaryBattery battery_stationary(double q, double lambda);

/// g(tau) = tau^2 + 2 tau / lambda + (2 - lambda) / lambda^2, the second
/// moment of tau + I_B with I_B geometric(lambda) on {1, 2, ...}.
double unbounded_second_moment(double tau, double lambda);

/// Smallest feasible threshold for Pinf / Finf, clamped at zero, in exact
/// arithmetic on the rationalized probabilities.
Rational feasibility_bound(Scheme scheme, const SystemParams& params);

/// Average age of Pinf / Finf when thresholds floor(tau) and ceil(tau) are
/// mixed so that the long-run mean threshold is exactly tau.  Throws
/// std::domain_error naming the binding constraint if tau is infeasible.
double mixed_threshold_aoi(Scheme scheme, const SystemParams& params, const RationalThreshold& tau);

/// The same expression with a real tau plugged straight into g.  Not
/// achievable on the slot grid; kept for comparison with the mixed value.
double real_threshold_aoi(Scheme scheme, const SystemParams& params, double tau);

}  // namespace aoi
