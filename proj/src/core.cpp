#include "aoi/core.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aoi/optimizer.hpp"

namespace aoi {

namespace {

constexpr std::array<std::string_view, 7> kSchemeNames{"P1", "F1", "Pinf", "Finf", "B0", "AA1", "AAinf"};

double parse_double(std::string_view text) {
  // std::from_chars for double is not available on every toolchain we build on.
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  return v;
}

bool in_unit_interval(double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; }

}  // namespace

std::string_view to_string(Scheme s) { return kSchemeNames[static_cast<std::size_t>(s)]; }

std::string_view to_string(Battery b) {
  switch (b) {
    case Battery::Zero:
      return "0";
    case Battery::One:
      return "1";
    case Battery::Unbounded:
      return "inf";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i)
    if (kSchemeNames[i] == text) return static_cast<Scheme>(i);
  return std::nullopt;
}

Battery required_battery(Scheme s) {
  switch (s) {
    case Scheme::P1:
    case Scheme::F1:
    case Scheme::AA1:
      return Battery::One;
    case Scheme::Pinf:
    case Scheme::Finf:
    case Scheme::AAinf:
      return Battery::Unbounded;
    case Scheme::B0:
      return Battery::Zero;
  }
  return Battery::Zero;
}

bool is_threshold_scheme(Scheme s) { return is_b1_threshold(s) || is_unbounded_threshold(s); }

Probability::Probability(Rational r)
    : value(static_cast<double>(r.numerator()) / static_cast<double>(r.denominator())), exact(r) {}

Probability Probability::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(text.substr(0, slash));
    const auto den = parse_int(text.substr(slash + 1));
    if (den <= 0) throw std::invalid_argument("fraction needs a positive denominator: '" + std::string(text) + "'");
    return Probability(Rational(num, den));
  }
  return {parse_double(text)};
}

Rational Probability::rational(std::int64_t max_den) const {
  if (exact) return *exact;
  return rationalize(value, max_den).rational();
}

SystemParams validate_params(Probability lambda, Probability q, Battery battery, Scheme scheme) {
  if (!in_unit_interval(lambda.value))
    throw std::invalid_argument("lambda must lie in (0, 1], got " + std::to_string(lambda.value));
  if (!in_unit_interval(q.value)) {
    if (q.value == 0.0) throw std::invalid_argument("q must be positive");
    throw std::invalid_argument("q must lie in (0, 1], got " + std::to_string(q.value));
  }
  if (required_battery(scheme) != battery)
    throw std::invalid_argument("scheme " + std::string(to_string(scheme)) + " needs battery " +
                                std::string(to_string(required_battery(scheme))) + ", got " +
                                std::string(to_string(battery)));

  bool always_on = false;
  switch (scheme) {
    case Scheme::Pinf:
    case Scheme::AAinf:
      always_on = q.rational() >= lambda.rational();
      break;
    case Scheme::Finf:
      // Staying on costs one unit every slot.
      always_on = q.rational() == Rational(1);
      break;
    default:
      break;
  }
  return SystemParams(std::move(lambda), std::move(q), battery, always_on);
}

RationalThreshold::RationalThreshold(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0) throw std::invalid_argument("threshold denominator must be positive");
  if (numerator < 0) throw std::invalid_argument("threshold must be nonnegative");
  value_ = Rational(numerator, denominator);
}

RationalThreshold::RationalThreshold(Rational r) {
  if (r < 0) throw std::invalid_argument("threshold must be nonnegative");
  value_ = r;
}

std::string RationalThreshold::to_string() const {
  if (is_integer()) return std::to_string(numerator());
  return std::to_string(numerator()) + "/" + std::to_string(denominator());
}

void RenewalStats::add(std::uint64_t interval) {
  std::uint64_t sq = 0;
  if (__builtin_mul_overflow(interval, interval, &sq) || __builtin_add_overflow(sum_T2_, sq, &sum_T2_))
    throw std::overflow_error("renewal second-moment accumulator overflow");
  sum_T_ += interval;
  ++count_;
}

void RenewalStats::merge(const RenewalStats& other) {
  if (__builtin_add_overflow(sum_T2_, other.sum_T2_, &sum_T2_))
    throw std::overflow_error("renewal second-moment accumulator overflow");
  sum_T_ += other.sum_T_;
  count_ += other.count_;
}

double aoi_from_moments(double mean_T, double mean_T2) {
  if (!(mean_T > 0.0)) throw std::invalid_argument("mean renewal interval must be positive");
  return mean_T2 / (2.0 * mean_T);
}

}  // namespace aoi
