// Slotted-time Monte Carlo engine for all seven receiver policies.
//
// Slot t runs in this order:
//   1. energy E_t is credited (capped at the battery capacity; a zero-size
//      battery can still spend same-slot energy),
//   2. the policy picks D_t from what it may observe,
//   3. D_t = 1 and S_t = 1 means the update is received and the age resets,
//   4. D_t = 1 debits one unit.
// Updates and energy come from two independently seeded substreams, so
// changing the policy never changes the arrival sample paths.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "aoi/core.hpp"

namespace aoi {

struct SlotHorizon {
  std::uint64_t slots = 0;
};
struct RenewalHorizon {
  std::uint64_t renewals = 0;
};
using Horizon = std::variant<SlotHorizon, RenewalHorizon>;

using ThresholdSpec = std::variant<std::monostate, std::uint64_t, RationalThreshold>;

/// One line of the optional debug trace.
struct SlotRecord {
  std::uint64_t t = 0;
  bool update = false;
  bool energy = false;
  std::uint64_t battery = 0;  // post-credit, before the debit
  bool on = false;
  bool received = false;
  std::uint64_t age = 0;
};

struct SimConfig {
  SystemParams params;
  Scheme scheme;
  ThresholdSpec tau;
  Horizon horizon = SlotHorizon{1'000'000};
  std::uint64_t seed = 0;
  std::uint64_t initial_battery = 0;
  bool record_battery_histogram = false;
  bool keep_intervals = false;
  std::function<void(const SlotRecord&)> trace;
};

struct SimResult {
  AoIEstimate estimate;
  RenewalStats renewal_stats;
  std::uint64_t slots_run = 0;
  std::uint64_t causality_deferrals = 0;
  /// Post-credit battery level -> fraction of slots.
  std::map<std::uint64_t, double> battery_histogram;
  std::vector<std::uint32_t> intervals;
};

/// Runs one replication.  Throws std::invalid_argument for an inconsistent
/// config and std::runtime_error if no renewal completes.
SimResult simulate(const SimConfig& config);

/// Slot fractions of each battery level under AAinf.  Requires q < lambda.
std::map<std::uint64_t, double> empirical_battery_occupancy(const SimConfig& config);

/// Online batch-means accumulator for the ratio estimator sum T^2 / (2 sum T).
/// Keeps between kMinBatches and 2 kMinBatches full batches, doubling the
/// batch size when it runs out of room.
class BatchMeans {
 public:
  static constexpr std::size_t kMinBatches = 64;

  void add(std::uint64_t interval);
  /// 95% halfwidth by the delta method over batch sums; +inf with fewer
  /// than two full batches.
  double halfwidth() const;
  std::size_t full_batches() const { return filled_; }

 private:
  struct Batch {
    double sum_T = 0.0;
    double sum_T2 = 0.0;
  };
  std::vector<Batch> batches_ = std::vector<Batch>(2 * kMinBatches);
  std::size_t filled_ = 0;
  std::uint64_t batch_size_ = 1;
  Batch current_;
  std::uint64_t in_current_ = 0;
};

/// Lag-1 sample autocorrelation of a sequence.
double lag1_autocorrelation(const std::vector<std::uint32_t>& xs);

}  // namespace aoi
