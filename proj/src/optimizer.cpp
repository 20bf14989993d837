#include "aoi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aoi/analytic.hpp"
#include "aoi/kernels.hpp"

namespace aoi {

namespace {

using i128 = __int128;

std::uint64_t abs_diff(i128 a, i128 b) { return static_cast<std::uint64_t>(a > b ? a - b : b - a); }

// Delta(tau) must be nondecreasing over the last ceil(1/q) grid points;
// otherwise the scan stopped too early.
bool tail_nondecreasing(const std::vector<double>& grid, double q) {
  const auto window = static_cast<std::size_t>(std::ceil(1.0 / q));
  const std::size_t start = grid.size() > window ? grid.size() - window : 1;
  for (std::size_t i = std::max<std::size_t>(start, 1); i < grid.size(); ++i)
    if (grid[i] < grid[i - 1] * (1.0 - kTieTolerance)) return false;
  return true;
}

}  // namespace

MixingSchedule::MixingSchedule(const RationalThreshold& tau) : tau_(tau) {
  const i128 num = tau.numerator();
  const i128 den = tau.denominator();
  cycle_length_ = static_cast<std::uint64_t>(den);
  low_threshold_ = static_cast<std::uint64_t>(tau.floor());
  high_threshold_ = static_cast<std::uint64_t>(tau.ceil());
  if (tau.is_integer()) {
    low_count_ = cycle_length_;
    high_count_ = 0;
    return;
  }
  low_count_ = abs_diff(num, static_cast<i128>(tau.ceil()) * den);
  high_count_ = abs_diff(num, static_cast<i128>(tau.floor()) * den);

  const i128 weighted = static_cast<i128>(low_count_) * low_threshold_ + static_cast<i128>(high_count_) * high_threshold_;
  if (low_count_ + high_count_ != cycle_length_ || weighted != num)
    throw std::logic_error("mixing schedule does not average to " + tau.to_string());
}

std::uint64_t MixingSchedule::threshold_for(std::uint64_t reception_index) const {
  if (high_count_ == 0) return low_threshold_;
  const i128 j = reception_index % cycle_length_;
  const i128 h = high_count_;
  const i128 d = cycle_length_;
  const bool high = ((j + 1) * h) / d != (j * h) / d;
  return high ? high_threshold_ : low_threshold_;
}

MixingSchedule mixing_schedule(const RationalThreshold& tau) { return MixingSchedule(tau); }

OptimizationResult select_threshold(const std::vector<double>& aoi_by_tau) {
  if (aoi_by_tau.empty()) throw std::invalid_argument("empty threshold grid");
  const double best = *std::min_element(aoi_by_tau.begin(), aoi_by_tau.end());
  OptimizationResult r;
  r.search_bound_used = aoi_by_tau.size() - 1;
  for (std::size_t tau = 0; tau < aoi_by_tau.size(); ++tau) {
    if (std::abs(aoi_by_tau[tau] - best) <= kTieTolerance * best) {
      if (r.ties.empty()) {
        r.tau_star = tau;
        r.aoi_star = aoi_by_tau[tau];
      }
      r.ties.push_back(tau);
    }
  }
  return r;
}

OptimizationResult optimize_threshold_b1(Scheme scheme, const SystemParams& params) {
  if (!is_b1_threshold(scheme)) throw std::invalid_argument("exhaustive threshold scan applies to P1 and F1 only");
  if (params.battery() != Battery::One) throw std::invalid_argument("P1 and F1 need the single-unit battery");

  const double at_zero = closed_form_aoi(scheme, params, 0);
  auto tau_max = static_cast<std::uint64_t>(std::ceil(4.0 * at_zero) + std::ceil(2.0 / params.q()));
  for (int attempt = 0; attempt < 16; ++attempt, tau_max *= 2) {
    const auto grid = kernels::threshold_grid(scheme, params, tau_max);
    if (tail_nondecreasing(grid, params.q())) return select_threshold(grid);
  }
  throw std::logic_error("average age did not settle into a nondecreasing tail");
}

RationalThreshold optimal_threshold_binf(Scheme scheme, const SystemParams& params) {
  if (!is_unbounded_threshold(scheme)) throw std::invalid_argument("rational thresholds apply to Pinf and Finf only");
  if (params.battery() != Battery::Unbounded) throw std::invalid_argument("Pinf and Finf need the unbounded battery");
  // The age is increasing in tau, so the optimum sits on the energy constraint.
  return RationalThreshold(feasibility_bound(scheme, params));
}

RationalThreshold rationalize(double x, std::int64_t max_denominator) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("rationalize needs a finite nonnegative number");
  if (max_denominator < 1) throw std::invalid_argument("max_denominator must be at least 1");

  // Convergents h/k; (p0, q0) is the one before (p1, q1).
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  long double r = x;
  while (true) {
    const long double a = std::floor(r);
    if (q1 > 0 && a > static_cast<long double>(max_denominator - q0) / static_cast<long double>(q1)) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t q2 = q0 + ai * q1;
    if (q2 > max_denominator) break;
    const std::int64_t p2 = p0 + ai * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const long double frac = r - a;
    if (frac == 0.0L || static_cast<double>(p1) / static_cast<double>(q1) == x) break;
    r = 1.0L / frac;
  }
  if (q1 == 0) throw std::logic_error("rationalize produced no convergent");

  // Best semiconvergent below the bound, against the last convergent.
  const std::int64_t k = (max_denominator - q0) / q1;
  const std::int64_t sp = p0 + k * p1;
  const std::int64_t sq = q0 + k * q1;
  const long double xl = x;
  const long double err_conv = std::abs(static_cast<long double>(p1) / q1 - xl);
  const long double err_semi = std::abs(static_cast<long double>(sp) / sq - xl);
  if (k > 0 && err_semi < err_conv) return {sp, sq};
  return {p1, q1};
}

SchemeOptimum optimize_scheme(Scheme scheme, const SystemParams& params) {
  switch (scheme) {
    case Scheme::P1:
    case Scheme::F1: {
      const auto r = optimize_threshold_b1(scheme, params);
      return {r.tau_star, r.aoi_star};
    }
    case Scheme::Pinf:
    case Scheme::Finf: {
      const auto tau = optimal_threshold_binf(scheme, params);
      return {tau, mixed_threshold_aoi(scheme, params, tau)};
    }
    case Scheme::AAinf:
      if (params.always_on()) {
        const double l = params.lambda();
        return {std::monostate{}, (2.0 - l) / (2.0 * l)};
      }
      return {std::monostate{}, closed_form_aoi(scheme, params)};
    case Scheme::B0:
    case Scheme::AA1:
      return {std::monostate{}, closed_form_aoi(scheme, params)};
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace aoi
