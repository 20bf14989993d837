#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"

using namespace aoi;

namespace {

SimConfig config(Scheme s, double lambda, double q, ThresholdSpec tau, std::uint64_t slots, std::uint64_t seed) {
  return SimConfig{validate_params(lambda, q, required_battery(s), s), s, tau, SlotHorizon{slots}, seed};
}

ThresholdSpec no_tau() { return std::monostate{}; }

}  // namespace

TEST_CASE("P1 simulation matches the closed form") {
  const auto r = simulate(config(Scheme::P1, 0.7, 0.5, std::uint64_t{0}, 1'000'000, 7));
  CHECK(std::abs(r.estimate.value - 1.7521008) <= 0.01 * 1.7521008);
  CHECK(r.estimate.ci_halfwidth > 0.0);
  CHECK(r.estimate.ci_halfwidth < 0.02);
  CHECK(r.estimate.provenance == Provenance::Simulated);
  CHECK(r.slots_run == 1'000'000);
}

TEST_CASE("a certain channel gives age one half for every scheme") {
  for (Scheme s : kAllSchemes) {
    const ThresholdSpec tau = is_threshold_scheme(s) ? ThresholdSpec{std::uint64_t{0}} : no_tau();
    const auto r = simulate(config(s, 1.0, 1.0, tau, 1000, 1));
    CHECK(r.estimate.value == 0.5);
    CHECK(r.renewal_stats.count() == 1000);
  }
}

TEST_CASE("runs are bit-identical for a fixed seed") {
  for (Scheme s : kAllSchemes) {
    const ThresholdSpec tau = is_threshold_scheme(s) ? ThresholdSpec{std::uint64_t{3}} : no_tau();
    const auto a = simulate(config(s, 0.4, 0.3, tau, 50'000, 42));
    const auto b = simulate(config(s, 0.4, 0.3, tau, 50'000, 42));
    CHECK(a.renewal_stats == b.renewal_stats);
    CHECK(a.estimate == b.estimate);
    const auto c = simulate(config(s, 0.4, 0.3, tau, 50'000, 43));
    CHECK_FALSE(a.renewal_stats == c.renewal_stats);
  }
}

TEST_CASE("arrival streams do not depend on the policy") {
  std::vector<std::pair<bool, bool>> x, y;
  auto cx = config(Scheme::P1, 0.4, 0.3, std::uint64_t{2}, 500, 9);
  cx.trace = [&](const SlotRecord& r) { x.emplace_back(r.update, r.energy); };
  auto cy = config(Scheme::AAinf, 0.4, 0.3, no_tau(), 500, 9);
  cy.trace = [&](const SlotRecord& r) { y.emplace_back(r.update, r.energy); };
  simulate(cx);
  simulate(cy);
  CHECK(x == y);
}

TEST_CASE("single-unit policies never defer for lack of energy") {
  for (Scheme s : {Scheme::P1, Scheme::F1, Scheme::AA1}) {
    const ThresholdSpec tau = is_threshold_scheme(s) ? ThresholdSpec{std::uint64_t{2}} : no_tau();
    auto c = config(s, 0.6, 0.3, tau, 200'000, 5);
    c.record_battery_histogram = true;
    const auto r = simulate(c);
    CHECK(r.causality_deferrals == 0);
    for (const auto& [level, frac] : r.battery_histogram) CHECK(level <= 1);
  }
}

TEST_CASE("energy causality holds slot by slot") {
  for (Scheme s : kAllSchemes) {
    const ThresholdSpec tau = is_threshold_scheme(s) ? ThresholdSpec{std::uint64_t{1}} : no_tau();
    auto c = config(s, 0.5, 0.3, tau, 20'000, 3);
    bool ok = true;
    c.trace = [&](const SlotRecord& r) {
      if (r.on && r.battery == 0) ok = false;
      if (r.received && !(r.on && r.update)) ok = false;
    };
    simulate(c);
    CHECK(ok);
  }
}

TEST_CASE("always-accept battery occupancy") {
  auto c = config(Scheme::AAinf, 0.5, 0.2, no_tau(), 1'000'000, 1);
  const auto occ = empirical_battery_occupancy(c);
  const auto pi = battery_stationary(0.2, 0.5);
  CHECK(std::abs(occ.at(0) - pi.pi0) <= 0.01);
  CHECK(std::abs(occ.at(1) - pi.pi1) <= 0.01);
  CHECK_THROWS_AS(empirical_battery_occupancy(config(Scheme::AAinf, 0.5, 0.5, no_tau(), 1000, 1)), std::domain_error);
}

TEST_CASE("renewal intervals are uncorrelated") {
  for (Scheme s : {Scheme::P1, Scheme::F1, Scheme::B0, Scheme::AA1}) {
    const ThresholdSpec tau = is_threshold_scheme(s) ? ThresholdSpec{std::uint64_t{2}} : no_tau();
    auto c = config(s, 0.5, 0.4, tau, 1'000'000, 13);
    c.keep_intervals = true;
    const auto r = simulate(c);
    const double n = static_cast<double>(r.intervals.size());
    CHECK(std::abs(lag1_autocorrelation(r.intervals)) < 3.0 / std::sqrt(n));
  }
}

TEST_CASE("mixed thresholds follow the schedule") {
  const RationalThreshold tau(5, 2);
  auto c = config(Scheme::Pinf, 0.5, Probability::parse("2/9").value, tau, 200'000, 4);
  const MixingSchedule sched(tau);
  std::vector<std::uint64_t> waits;
  std::uint64_t since = 0;
  bool ok = true;
  std::uint64_t k = 0;
  c.trace = [&](const SlotRecord& r) {
    ++since;
    // Pinf may not turn on until age passes the threshold for this renewal.
    if (r.on && since <= sched.threshold_for(k)) ok = false;
    if (r.received) {
      ++k;
      since = 0;
    }
  };
  const auto res = simulate(c);
  CHECK(ok);
  CHECK(k == res.renewal_stats.count());
}

TEST_CASE("renewal horizon stops after the requested count") {
  auto c = config(Scheme::B0, 0.5, 0.5, no_tau(), 1, 2);
  c.horizon = RenewalHorizon{1234};
  const auto r = simulate(c);
  CHECK(r.renewal_stats.count() == 1234);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(simulate(config(Scheme::P1, 0.5, 0.5, no_tau(), 100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(simulate(config(Scheme::B0, 0.5, 0.5, std::uint64_t{1}, 100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(simulate(config(Scheme::P1, 0.5, 0.5, RationalThreshold(5, 2), 100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(simulate(config(Scheme::B0, 0.5, 0.5, no_tau(), 0, 1)), std::invalid_argument);
  auto c = config(Scheme::P1, 0.5, 0.5, std::uint64_t{0}, 100, 1);
  c.initial_battery = 2;
  CHECK_THROWS_AS(simulate(c), std::invalid_argument);
  CHECK_THROWS_AS(simulate(config(Scheme::B0, 0.001, 0.001, no_tau(), 5, 1)), std::runtime_error);
}

TEST_CASE("batch means") {
  BatchMeans b;
  CHECK(std::isinf(b.halfwidth()));
  for (int i = 0; i < 10'000; ++i) b.add(static_cast<std::uint64_t>(1 + i % 3));
  CHECK(b.full_batches() >= BatchMeans::kMinBatches);
  CHECK(b.full_batches() <= 2 * BatchMeans::kMinBatches);
  CHECK(std::isfinite(b.halfwidth()));
  BatchMeans c;
  for (int i = 0; i < 1000; ++i) c.add(4);
  CHECK(c.halfwidth() == 0.0);
}
