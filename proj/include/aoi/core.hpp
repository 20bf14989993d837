// Domain types shared by every module: system parameters, the policy
// catalogue, exact rational thresholds and renewal-reward accumulators.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/rational.hpp>

namespace aoi {

using Rational = boost::rational<std::int64_t>;

/// Denominator bound used when a decimal probability must become exact.
inline constexpr std::int64_t kDefaultMaxDenominator = 1'000'000;

enum class Battery { Zero, One, Unbounded };

/// The seven receiver policies.  P = partial power down, F = full power down,
/// B0 = no battery, AA = always accept.
enum class Scheme { P1, F1, Pinf, Finf, B0, AA1, AAinf };

inline constexpr std::array<Scheme, 7> kAllSchemes{Scheme::P1,  Scheme::F1,  Scheme::Pinf, Scheme::Finf,
                                                   Scheme::B0,  Scheme::AA1, Scheme::AAinf};

std::string_view to_string(Scheme s);
std::string_view to_string(Battery b);
std::optional<Scheme> parse_scheme(std::string_view text);

Battery required_battery(Scheme s);
bool is_threshold_scheme(Scheme s);
inline bool is_unbounded_threshold(Scheme s) { return s == Scheme::Pinf || s == Scheme::Finf; }
inline bool is_b1_threshold(Scheme s) { return s == Scheme::P1 || s == Scheme::F1; }

/// A probability given either as a decimal or as an exact fraction "a/b".
struct Probability {
  double value = 0.0;
  std::optional<Rational> exact;

  Probability() = default;
  Probability(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  explicit Probability(Rational r);

  /// Accepts "0.25", "1e-1" or "1/4".  Throws std::invalid_argument.
  static Probability parse(std::string_view text);

  /// Exact value: the given fraction, or the best rational approximation of
  /// the decimal with denominator <= max_den.
  Rational rational(std::int64_t max_den = kDefaultMaxDenominator) const;

  friend bool operator==(const Probability&, const Probability&) = default;
};

class SystemParams;

SystemParams validate_params(Probability lambda, Probability q, Battery battery, Scheme scheme);

/// Validated (lambda, q, battery) triple.  Immutable; only validate_params
/// constructs it.
class SystemParams {
 public:
  double lambda() const { return lambda_.value; }
  double q() const { return q_.value; }
  Battery battery() const { return battery_; }

  Rational lambda_rational() const { return lambda_.rational(); }
  Rational q_rational() const { return q_.rational(); }

  /// Set when the scheme's energy constraint is slack at threshold zero, so
  /// the receiver may stay on (Pinf: q >= lambda, Finf: q == 1,
  /// AAinf: q >= lambda).
  bool always_on() const { return always_on_; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  friend SystemParams validate_params(Probability, Probability, Battery, Scheme);
  SystemParams(Probability lambda, Probability q, Battery battery, bool always_on)
      : lambda_(std::move(lambda)), q_(std::move(q)), battery_(battery), always_on_(always_on) {}

  Probability lambda_;
  Probability q_;
  Battery battery_;
  bool always_on_;
};

/// Nonnegative rational threshold f_N / f_D in lowest terms.
class RationalThreshold {
 public:
  RationalThreshold() = default;
  /// Throws std::invalid_argument for a negative value or zero denominator.
  RationalThreshold(std::int64_t numerator, std::int64_t denominator);
  explicit RationalThreshold(Rational r);
  static RationalThreshold integer(std::uint64_t tau) { return {static_cast<std::int64_t>(tau), 1}; }

  std::int64_t numerator() const { return value_.numerator(); }
  std::int64_t denominator() const { return value_.denominator(); }
  const Rational& rational() const { return value_; }
  double value() const { return static_cast<double>(value_.numerator()) / static_cast<double>(value_.denominator()); }
  bool is_integer() const { return value_.denominator() == 1; }
  std::int64_t floor() const { return value_.numerator() / value_.denominator(); }
  std::int64_t ceil() const { return is_integer() ? floor() : floor() + 1; }

  std::string to_string() const;

  friend bool operator==(const RationalThreshold&, const RationalThreshold&) = default;

 private:
  Rational value_{0};
};

/// Running sums over completed renewal intervals (in slots).
class RenewalStats {
 public:
  void add(std::uint64_t interval);
  void merge(const RenewalStats& other);

  std::uint64_t sum_T() const { return sum_T_; }
  std::uint64_t sum_T2() const { return sum_T2_; }
  std::uint64_t count() const { return count_; }

  double mean_T() const { return static_cast<double>(sum_T_) / static_cast<double>(count_); }
  double mean_T2() const { return static_cast<double>(sum_T2_) / static_cast<double>(count_); }

  friend bool operator==(const RenewalStats&, const RenewalStats&) = default;

 private:
  std::uint64_t sum_T_ = 0;
  std::uint64_t sum_T2_ = 0;
  std::uint64_t count_ = 0;
};

enum class Provenance { Analytic, Simulated, Oracle };

struct AoIEstimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;  // 0 for analytic values
  Provenance provenance = Provenance::Analytic;
  std::uint64_t slots_or_terms = 0;

  friend bool operator==(const AoIEstimate&, const AoIEstimate&) = default;
};

/// Average age from renewal moments, E[T^2] / (2 E[T]).  The half-slot
/// integer-grid term is left out everywhere.
double aoi_from_moments(double mean_T, double mean_T2);

}  // namespace aoi
