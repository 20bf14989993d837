#include "aoi/simulator.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "aoi/optimizer.hpp"

namespace aoi {

namespace {

constexpr std::uint32_t kUpdateStream = 0;
constexpr std::uint32_t kEnergyStream = 1;
constexpr std::uint64_t kNoLimit = std::numeric_limits<std::uint64_t>::max();

// Bernoulli(p) draws from a dedicated mt19937_64 substream.  Comparing the
// raw 64-bit output against floor(p 2^64) keeps the sample path identical on
// every standard library.
class BernoulliStream {
 public:
  BernoulliStream(std::uint64_t seed, std::uint32_t stream, double p)
      : gen_(make_seed(seed, stream)), always_(p >= 1.0) {
    if (!always_) threshold_ = static_cast<std::uint64_t>(static_cast<long double>(p) * 18446744073709551616.0L);
  }

  bool next() {
    const std::uint64_t draw = gen_();  // advance even when p == 1
    return always_ || draw < threshold_;
  }

 private:
  static std::mt19937_64 make_seed(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
  }

  std::mt19937_64 gen_;
  std::uint64_t threshold_ = 0;
  bool always_;
};

std::uint64_t capacity(Battery b) {
  switch (b) {
    case Battery::Zero:
      return 0;
    case Battery::One:
      return 1;
    case Battery::Unbounded:
      return kNoLimit;
  }
  return 0;
}

// The threshold actually in force: integer for P1/F1, a mixing schedule for
// Pinf/Finf.
struct ResolvedThreshold {
  std::uint64_t fixed = 0;
  std::optional<MixingSchedule> schedule;

  std::uint64_t for_reception(std::uint64_t k) const { return schedule ? schedule->threshold_for(k) : fixed; }
};

ResolvedThreshold resolve_threshold(const SimConfig& c) {
  const bool wants = is_threshold_scheme(c.scheme);
  const bool has = !std::holds_alternative<std::monostate>(c.tau);
  if (wants != has)
    throw std::invalid_argument(std::string("scheme ") + std::string(to_string(c.scheme)) +
                                (wants ? " needs a threshold" : " takes no threshold"));
  ResolvedThreshold r;
  if (!wants) return r;
  if (const auto* n = std::get_if<std::uint64_t>(&c.tau)) {
    r.fixed = *n;
    return r;
  }
  const auto& rt = std::get<RationalThreshold>(c.tau);
  if (is_b1_threshold(c.scheme)) {
    if (!rt.is_integer()) throw std::invalid_argument("P1 and F1 take integer thresholds only");
    r.fixed = static_cast<std::uint64_t>(rt.numerator());
    return r;
  }
  if (rt.is_integer())
    r.fixed = static_cast<std::uint64_t>(rt.numerator());
  else
    r.schedule.emplace(rt);
  return r;
}

void check_config(const SimConfig& c) {
  if (c.params.battery() != required_battery(c.scheme))
    throw std::invalid_argument("scheme " + std::string(to_string(c.scheme)) + " needs battery " +
                                std::string(to_string(required_battery(c.scheme))));
  const bool empty_horizon = std::visit(
      [](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, SlotHorizon>)
          return h.slots == 0;
        else
          return h.renewals == 0;
      },
      c.horizon);
  if (empty_horizon) throw std::invalid_argument("horizon must be at least 1");
  if (c.initial_battery > capacity(c.params.battery()))
    throw std::invalid_argument("initial battery exceeds capacity");
}

struct Outcome {
  RenewalStats stats;
  BatchMeans batches;
  std::vector<std::uint32_t> intervals;
  std::vector<std::uint64_t> histogram;
  std::uint64_t slots = 0;
  std::uint64_t deferrals = 0;
};

template <Scheme S>
void run_slots(const SimConfig& c, const ResolvedThreshold& threshold, Outcome& out) {
  const std::uint64_t cap = capacity(c.params.battery());
  // A zero-size battery can still spend energy harvested in the same slot.
  const std::uint64_t in_slot_cap = cap == 0 ? 1 : cap;
  std::uint64_t slot_limit = kNoLimit;
  std::uint64_t renewal_limit = kNoLimit;
  if (const auto* h = std::get_if<SlotHorizon>(&c.horizon))
    slot_limit = h->slots;
  else
    renewal_limit = std::get<RenewalHorizon>(c.horizon).renewals;

  BernoulliStream updates(c.seed, kUpdateStream, c.params.lambda());
  BernoulliStream energy(c.seed, kEnergyStream, c.params.q());

  std::uint64_t battery = c.initial_battery;
  std::uint64_t age = 0;  // slot 0 counts as a reception
  std::uint64_t receptions = 0;
  std::uint64_t tau = threshold.for_reception(0);
  const bool histogram = c.record_battery_histogram;

  std::uint64_t t = 0;
  while (t < slot_limit && out.stats.count() < renewal_limit) {
    ++t;
    ++age;
    const bool s = updates.next();
    const bool e = energy.next();

    std::uint64_t avail = battery + (e ? 1 : 0);
    if constexpr (S == Scheme::Pinf || S == Scheme::Finf || S == Scheme::AAinf) {
      if (avail == 0 && e) throw std::overflow_error("battery counter overflow");
    } else {
      if (avail > in_slot_cap) avail = in_slot_cap;
    }

    bool on = false;
    if constexpr (S == Scheme::P1 || S == Scheme::AA1) {
      on = s && avail >= 1 && age >= tau;
    } else if constexpr (S == Scheme::F1) {
      on = avail >= 1 && age >= tau;
    } else if constexpr (S == Scheme::B0 || S == Scheme::AAinf) {
      on = s && avail >= 1;
    } else if constexpr (S == Scheme::Pinf) {
      const bool want = s && age > tau;
      if (want && avail == 0) ++out.deferrals;
      on = want && avail >= 1;
    } else if constexpr (S == Scheme::Finf) {
      const bool want = age > tau;
      if (want && avail == 0) ++out.deferrals;
      on = want && avail >= 1;
    }
    assert(!on || avail >= 1);  // energy causality

    const bool received = on && s;
    if (histogram) {
      if (avail >= out.histogram.size()) out.histogram.resize(avail + 1, 0);
      ++out.histogram[avail];
    }
    if (c.trace) c.trace(SlotRecord{t, s, e, avail, on, received, received ? 0 : age});

    battery = avail - (on ? 1 : 0);
    if (battery > cap) battery = cap;

    if (received) {
      out.stats.add(age);
      out.batches.add(age);
      if (c.keep_intervals) {
        if (age > std::numeric_limits<std::uint32_t>::max()) throw std::overflow_error("interval exceeds 2^32 slots");
        out.intervals.push_back(static_cast<std::uint32_t>(age));
      }
      age = 0;
      ++receptions;
      tau = threshold.for_reception(receptions);
    }
  }
  out.slots = t;
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  check_config(config);
  const auto threshold = resolve_threshold(config);

  Outcome out;
  switch (config.scheme) {
    case Scheme::P1:
      run_slots<Scheme::P1>(config, threshold, out);
      break;
    case Scheme::F1:
      run_slots<Scheme::F1>(config, threshold, out);
      break;
    case Scheme::Pinf:
      run_slots<Scheme::Pinf>(config, threshold, out);
      break;
    case Scheme::Finf:
      run_slots<Scheme::Finf>(config, threshold, out);
      break;
    case Scheme::B0:
      run_slots<Scheme::B0>(config, threshold, out);
      break;
    case Scheme::AA1:
      run_slots<Scheme::AA1>(config, threshold, out);
      break;
    case Scheme::AAinf:
      run_slots<Scheme::AAinf>(config, threshold, out);
      break;
  }

  if (out.stats.count() == 0)
    throw std::runtime_error("no renewal completed within " + std::to_string(out.slots) +
                             " slots; use a longer horizon");

  SimResult r;
  r.renewal_stats = out.stats;
  r.slots_run = out.slots;
  r.causality_deferrals = out.deferrals;
  r.intervals = std::move(out.intervals);
  r.estimate.value = aoi_from_moments(static_cast<double>(out.stats.sum_T()), static_cast<double>(out.stats.sum_T2()));
  r.estimate.ci_halfwidth = out.batches.halfwidth();
  r.estimate.provenance = Provenance::Simulated;
  r.estimate.slots_or_terms = out.slots;
  for (std::size_t level = 0; level < out.histogram.size(); ++level)
    if (out.histogram[level] > 0)
      r.battery_histogram[level] = static_cast<double>(out.histogram[level]) / static_cast<double>(out.slots);
  return r;
}

std::map<std::uint64_t, double> empirical_battery_occupancy(const SimConfig& config) {
  if (config.params.battery() == Battery::Unbounded && !(config.params.q() < config.params.lambda()))
    throw std::domain_error("battery level is not positive recurrent unless q < lambda");
  SimConfig c = config;
  c.record_battery_histogram = true;
  return simulate(c).battery_histogram;
}

void BatchMeans::add(std::uint64_t interval) {
  const auto x = static_cast<double>(interval);
  current_.sum_T += x;
  current_.sum_T2 += x * x;
  if (++in_current_ < batch_size_) return;
  batches_[filled_++] = current_;
  current_ = {};
  in_current_ = 0;
  if (filled_ == batches_.size()) {
    for (std::size_t i = 0; i < kMinBatches; ++i) {
      batches_[i].sum_T = batches_[2 * i].sum_T + batches_[2 * i + 1].sum_T;
      batches_[i].sum_T2 = batches_[2 * i].sum_T2 + batches_[2 * i + 1].sum_T2;
    }
    filled_ = kMinBatches;
    batch_size_ *= 2;
  }
}

double BatchMeans::halfwidth() const {
  if (filled_ < 2) return std::numeric_limits<double>::infinity();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < filled_; ++i) {
    sx += batches_[i].sum_T;
    sy += batches_[i].sum_T2;
  }
  const double ratio = sy / (2.0 * sx);
  double ss = 0.0;
  for (std::size_t i = 0; i < filled_; ++i) {
    const double d = batches_[i].sum_T2 - 2.0 * ratio * batches_[i].sum_T;
    ss += d * d;
  }
  const auto k = static_cast<double>(filled_);
  const double mean_x = sx / k;
  const double var = ss / (k - 1.0) / (k * 4.0 * mean_x * mean_x);
  const boost::math::students_t dist(k - 1.0);
  return boost::math::quantile(dist, 0.975) * std::sqrt(var);
}

double lag1_autocorrelation(const std::vector<std::uint32_t>& xs) {
  if (xs.size() < 3) return 0.0;
  double mean = 0.0;
  for (auto x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - mean;
    den += d * d;
    if (i + 1 < xs.size()) num += d * (xs[i + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace aoi
