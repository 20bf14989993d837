// Threshold selection: exhaustive integer scan for the single-unit battery,
// exact rational thresholds and floor/ceil mixing for the unbounded battery.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "aoi/core.hpp"

namespace aoi {

/// Deterministic alternation of floor(tau) and ceil(tau) over a cycle of
/// f_D receptions whose mean threshold is exactly tau.
class MixingSchedule {
 public:
  explicit MixingSchedule(const RationalThreshold& tau);

  std::uint64_t low_threshold() const { return low_threshold_; }
  std::uint64_t high_threshold() const { return high_threshold_; }
  std::uint64_t low_count() const { return low_count_; }
  std::uint64_t high_count() const { return high_count_; }
  std::uint64_t cycle_length() const { return cycle_length_; }
  const RationalThreshold& tau() const { return tau_; }

  /// Threshold applied after the k-th reception (k counts from 0).  Within
  /// each cycle the high threshold is spread evenly.
  std::uint64_t threshold_for(std::uint64_t reception_index) const;

 private:
  RationalThreshold tau_;
  std::uint64_t low_threshold_ = 0;
  std::uint64_t high_threshold_ = 0;
  std::uint64_t low_count_ = 0;
  std::uint64_t high_count_ = 0;
  std::uint64_t cycle_length_ = 1;
};

MixingSchedule mixing_schedule(const RationalThreshold& tau);

struct OptimizationResult {
  std::uint64_t tau_star = 0;
  double aoi_star = 0.0;
  std::uint64_t search_bound_used = 0;
  std::vector<std::uint64_t> ties;
};

/// Relative gap under which two thresholds are reported as ties.
inline constexpr double kTieTolerance = 1e-12;

/// Scans tau in [0, ceil(4 Delta(0)) + ceil(2/q)] for P1 or F1; smallest tau
/// wins ties.  The grid is evaluated with the OpenMP kernel.
OptimizationResult optimize_threshold_b1(Scheme scheme, const SystemParams& params);

/// Picks the optimum out of an already evaluated grid (index = tau).
OptimizationResult select_threshold(const std::vector<double>& aoi_by_tau);

/// tau* = 1/q - 1/lambda (Pinf, clamped at 0) or (1/lambda)(1/q - 1) (Finf),
/// exact on the rationalized probabilities.
RationalThreshold optimal_threshold_binf(Scheme scheme, const SystemParams& params);

/// Best rational approximation with denominator <= max_denominator, from
/// continued-fraction convergents and semiconvergents.
RationalThreshold rationalize(double x, std::int64_t max_denominator);

/// Optimal operating point of any scheme: the threshold (none, integer or
/// rational) and the analytic average age there.  AAinf with q >= lambda
/// and Pinf in the always-on regime evaluate to (2 - lambda) / (2 lambda).
struct SchemeOptimum {
  std::variant<std::monostate, std::uint64_t, RationalThreshold> tau;
  double aoi = 0.0;
};

SchemeOptimum optimize_scheme(Scheme scheme, const SystemParams& params);

}  // namespace aoi
