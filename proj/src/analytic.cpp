#include "aoi/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {

namespace {

void require_probability(double p, const char* name) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
}

void require_tau(Scheme scheme, const std::optional<std::uint64_t>& tau) {
  if (is_b1_threshold(scheme) && !tau)
    throw std::invalid_argument(std::string(to_string(scheme)) + " needs a threshold");
  if (!is_b1_threshold(scheme) && tau)
    throw std::invalid_argument(std::string(to_string(scheme)) + " takes no threshold");
}

// Moments of S = I_A2 + ... + I_AN where N - 1 is geometric(lambda) on {0, 1, ...}.
Moments retrial_moments(double q, double lambda) {
  const double ql = q * lambda;
  return {(1.0 - lambda) / ql, (2.0 - ql) * (1.0 - lambda) / (ql * ql)};
}

}  // namespace

Moments geometric_moments(double p, int support_start) {
  require_probability(p, "p");
  if (support_start == 1) return {1.0 / p, (2.0 - p) / (p * p)};
  if (support_start == 0) return {(1.0 - p) / p, (1.0 - p) * (2.0 - p) / (p * p)};
  throw std::invalid_argument("geometric support must start at 0 or 1");
}

double pow_one_minus(double q, std::uint64_t tau) {
  const double base = 1.0 - q;
  if (tau <= 64) {
    double r = 1.0;
    for (std::uint64_t i = 0; i < tau; ++i) r *= base;
    return r;
  }
  return std::exp(static_cast<double>(tau) * std::log1p(-q));
}

Moments threshold_wait_moments(double q, std::uint64_t tau) {
  require_probability(q, "q");
  const double t = static_cast<double>(tau);
  const double tail = pow_one_minus(q, tau);
  return {tail / q + t, t * t + (2.0 * t / q + (2.0 - q) / (q * q)) * tail};
}

Moments renewal_moments(Scheme scheme, const SystemParams& params, std::optional<std::uint64_t> tau) {
  require_tau(scheme, tau);
  const double q = params.q();
  const double lambda = params.lambda();
  switch (scheme) {
    case Scheme::P1:
    case Scheme::AA1: {
      // T = max(tau, I_A) + I_B, I_B geometric on {0, 1, ...}.
      const auto x = threshold_wait_moments(q, tau.value_or(0));
      const auto b = geometric_moments(lambda, 0);
      return {x.mean + b.mean, x.second_moment + 2.0 * x.mean * b.mean + b.second_moment};
    }
    case Scheme::F1: {
      // T = max(tau, I_A1) + retrials, each retrial one energy interval.
      const auto x = threshold_wait_moments(q, *tau);
      const auto s = retrial_moments(q, lambda);
      return {x.mean + s.mean, x.second_moment + 2.0 * x.mean * s.mean + s.second_moment};
    }
    case Scheme::B0:
      return geometric_moments(q * lambda, 1);
    default:
      throw std::invalid_argument("no i.i.d. renewal moments for scheme " + std::string(to_string(scheme)));
  }
}

double closed_form_aoi(Scheme scheme, const SystemParams& params, std::optional<std::uint64_t> tau) {
  require_tau(scheme, tau);
  if (params.battery() != required_battery(scheme))
    throw std::invalid_argument("parameters were validated for a different battery");
  const double q = params.q();
  const double l = params.lambda();
  switch (scheme) {
    case Scheme::P1:
    case Scheme::F1: {
      const auto m = renewal_moments(scheme, params, tau);
      return aoi_from_moments(m.mean, m.second_moment);
    }
    case Scheme::B0:
      return (2.0 - q * l) / (2.0 * q * l);
    case Scheme::AA1: {
      const double num = (2.0 - l) * (1.0 - l) / (l * l) + (2.0 - q) / (q * q) + 2.0 * (1.0 - l) / (l * q);
      const double den = 1.0 / q + (1.0 - l) / l;
      return 0.5 * num / den;
    }
    case Scheme::AAinf: {
      const auto [pi0, pi1] = battery_stationary(q, l);
      const double rich = 1.0 - pi1 - pi0;  // update finds two or more units
      const double num = rich * (2.0 - l) / (l * l) +
                         pi1 * ((2.0 - l) * (1.0 - l) / (l * l) + (2.0 - q) / (q * q) + 2.0 * (1.0 - l) / (l * q));
      const double den = rich / l + pi1 * (1.0 / q + (1.0 - l) / l);
      return 0.5 * num / den;
    }
    case Scheme::Pinf:
    case Scheme::Finf:
      throw std::invalid_argument("use mixed_threshold_aoi for unbounded-battery threshold schemes");
  }
  return 0.0;
}

StationaryBattery battery_stationary(double q, double lambda) {
  require_probability(q, "q");
  require_probability(lambda, "lambda");
  if (!(q < lambda))
    throw std::domain_error("battery chain has no stationary distribution unless q < lambda");
  const double pi0 = 1.0 - q - q * (1.0 - lambda) / lambda;
  return {pi0, q / (lambda * (1.0 - q)) * pi0};
}

double unbounded_second_moment(double tau, double lambda) {
  return tau * tau + 2.0 * tau / lambda + (2.0 - lambda) / (lambda * lambda);
}

Rational feasibility_bound(Scheme scheme, const SystemParams& params) {
  const Rational one(1);
  const Rational inv_q = one / params.q_rational();
  const Rational inv_l = one / params.lambda_rational();
  switch (scheme) {
    case Scheme::Pinf: {
      const Rational b = inv_q - inv_l;
      return b < 0 ? Rational(0) : b;
    }
    case Scheme::Finf:
      return inv_l * (inv_q - one);
    default:
      throw std::invalid_argument("feasibility bound is defined for Pinf and Finf only");
  }
}

double mixed_threshold_aoi(Scheme scheme, const SystemParams& params, const RationalThreshold& tau) {
  if (!is_unbounded_threshold(scheme))
    throw std::invalid_argument("mixed thresholds apply to Pinf and Finf only");
  if (params.battery() != Battery::Unbounded)
    throw std::invalid_argument("parameters were validated for a different battery");
  const Rational bound = feasibility_bound(scheme, params);
  if (tau.rational() < bound) {
    const char* constraint = scheme == Scheme::Pinf ? "E[T] >= 1/q (tau >= 1/q - 1/lambda)"
                                                    : "E[I_B]/(tau + E[I_B]) <= q (tau >= (1/lambda)(1/q - 1))";
    throw std::domain_error(std::string(to_string(scheme)) + " threshold " + tau.to_string() +
                            " violates the energy constraint " + constraint + "; minimal feasible threshold is " +
                            RationalThreshold(bound).to_string());
  }
  const double l = params.lambda();
  const double mean_T = tau.value() + 1.0 / l;
  if (tau.is_integer()) return aoi_from_moments(mean_T, unbounded_second_moment(tau.value(), l));

  const Rational low_weight = Rational(tau.ceil()) - tau.rational();
  const Rational high_weight = Rational(1) - low_weight;
  const auto to_double = [](const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
  };
  const double mean_T2 = to_double(low_weight) * unbounded_second_moment(static_cast<double>(tau.floor()), l) +
                         to_double(high_weight) * unbounded_second_moment(static_cast<double>(tau.ceil()), l);
  return aoi_from_moments(mean_T, mean_T2);
}

double real_threshold_aoi(Scheme scheme, const SystemParams& params, double tau) {
  if (!is_unbounded_threshold(scheme))
    throw std::invalid_argument("real thresholds apply to Pinf and Finf only");
  if (!(tau >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
  const double l = params.lambda();
  return aoi_from_moments(tau + 1.0 / l, unbounded_second_moment(tau, l));
}

}  // namespace aoi
