#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "aoi/analytic.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/oracle.hpp"

using namespace aoi;

namespace {

SystemParams params(Scheme s, double lambda, double q) { return validate_params(lambda, q, required_battery(s), s); }

}  // namespace

TEST_CASE("B1 optimum with ties") {
  const auto p1 = optimize_threshold_b1(Scheme::P1, params(Scheme::P1, 0.7, 1.0));
  CHECK(p1.tau_star == 0);
  CHECK(p1.aoi_star == doctest::Approx(13.0 / 14.0).epsilon(1e-14));
  CHECK(p1.ties == std::vector<std::uint64_t>{0, 1});

  const auto f1 = optimize_threshold_b1(Scheme::F1, params(Scheme::F1, 1.0, 0.5));
  CHECK(f1.tau_star == 0);
  CHECK(f1.aoi_star == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f1.ties == std::vector<std::uint64_t>{0, 1, 2});

  const auto one = optimize_threshold_b1(Scheme::P1, params(Scheme::P1, 1.0, 1.0));
  CHECK(one.aoi_star == 0.5);
}

TEST_CASE("B1 ties agree with the enumeration oracle") {
  // With q = 1 energy is never short, so tau in {0, 1} gives the same interval.
  const auto a = enum_renewal_moments(Scheme::P1, 1.0, 0.7, 0, 1e-12);
  const auto b = enum_renewal_moments(Scheme::P1, 1.0, 0.7, 1, 1e-12);
  CHECK(aoi_from_moments(a.mean, a.second_moment) == doctest::Approx(13.0 / 14.0).epsilon(1e-10));
  CHECK(aoi_from_moments(b.mean, b.second_moment) == doctest::Approx(13.0 / 14.0).epsilon(1e-10));
  for (std::uint64_t tau : {0u, 1u, 2u}) {
    const auto f = enum_renewal_moments(Scheme::F1, 0.5, 1.0, tau, 1e-12);
    CHECK(aoi_from_moments(f.mean, f.second_moment) == doctest::Approx(1.5).epsilon(1e-10));
  }
}

TEST_CASE("select_threshold") {
  const auto r = select_threshold({3.0, 2.0, 2.0 * (1 + 1e-14), 2.5});
  CHECK(r.tau_star == 1);
  CHECK(r.ties == std::vector<std::uint64_t>{1, 2});
  CHECK_THROWS(select_threshold({}));
}

TEST_CASE("property: B1 optimum matches an independent long scan") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 60; ++i) {
    const double q = u(rng), lambda = u(rng);
    for (Scheme s : {Scheme::P1, Scheme::F1}) {
      const auto p = params(s, lambda, q);
      const auto r = optimize_threshold_b1(s, p);
      double best = closed_form_aoi(s, p, 0);
      for (std::uint64_t t = 1; t < 2000; ++t) best = std::min(best, closed_form_aoi(s, p, t));
      CHECK(r.aoi_star == doctest::Approx(best).epsilon(1e-13));
      CHECK(r.aoi_star <= closed_form_aoi(s, p, 0) + 1e-15);
      CHECK(closed_form_aoi(s, p, r.tau_star) == r.aoi_star);
      CHECK(r.search_bound_used >= r.tau_star);
    }
  }
}

TEST_CASE("unbounded-battery thresholds are exact") {
  CHECK(optimal_threshold_binf(Scheme::Pinf, params(Scheme::Pinf, 0.5, 0.25)) == RationalThreshold::integer(2));
  CHECK(optimal_threshold_binf(Scheme::Finf, params(Scheme::Finf, 0.5, 0.25)) == RationalThreshold::integer(6));
  CHECK(optimal_threshold_binf(Scheme::Pinf, params(Scheme::Pinf, 0.7, 0.3)) == RationalThreshold(40, 21));
  CHECK(optimal_threshold_binf(Scheme::Pinf, params(Scheme::Pinf, 0.5, 0.8)) == RationalThreshold::integer(0));
  // Finf keeps its energy constraint until q = 1.
  CHECK(optimal_threshold_binf(Scheme::Finf, params(Scheme::Finf, 0.5, 0.8)) == RationalThreshold(1, 2));
  CHECK(optimal_threshold_binf(Scheme::Finf, params(Scheme::Finf, 0.5, 1.0)) == RationalThreshold::integer(0));
}

TEST_CASE("property: tau* sits exactly on the feasibility boundary") {
  for (std::int64_t qn = 1; qn < 20; ++qn)
    for (std::int64_t ln = 1; ln <= 20; ++ln) {
      const Rational q(qn, 20), l(ln, 20);
      const auto pp = validate_params(Probability(l), Probability(q), Battery::Unbounded, Scheme::Pinf);
      const auto pf = validate_params(Probability(l), Probability(q), Battery::Unbounded, Scheme::Finf);
      const Rational one(1);
      Rational want_p = one / q - one / l;
      if (want_p < 0) want_p = 0;
      CHECK(optimal_threshold_binf(Scheme::Pinf, pp).rational() == want_p);
      CHECK(optimal_threshold_binf(Scheme::Finf, pf).rational() == (one / l) * (one / q - one));
      // Long-run energy balance: (tau* + E[I_B]) q = 1 for Pinf below saturation.
      if (q < l) CHECK((want_p + one / l) * q == one);
    }
}

TEST_CASE("mixing schedule") {
  const auto s = mixing_schedule(RationalThreshold(5, 2));
  CHECK(s.low_threshold() == 2);
  CHECK(s.high_threshold() == 3);
  CHECK(s.low_count() == 1);
  CHECK(s.high_count() == 1);
  CHECK(s.cycle_length() == 2);

  const auto t = mixing_schedule(RationalThreshold(40, 21));
  CHECK(t.low_threshold() == 1);
  CHECK(t.high_threshold() == 2);
  CHECK(t.low_count() == 2);
  CHECK(t.high_count() == 19);
  CHECK(t.cycle_length() == 21);

  const auto i = mixing_schedule(RationalThreshold::integer(3));
  CHECK(i.low_threshold() == 3);
  CHECK(i.high_threshold() == 3);
  CHECK(i.cycle_length() == 1);
  CHECK(i.threshold_for(0) == 3);
  CHECK(i.threshold_for(99) == 3);
}

TEST_CASE("property: a mixing cycle averages to tau exactly") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::int64_t> num(0, 5000), den(1, 300);
  for (int i = 0; i < 1000; ++i) {
    const RationalThreshold tau(num(rng), den(rng));
    const auto s = mixing_schedule(tau);
    CHECK(s.low_count() + s.high_count() == s.cycle_length());
    CHECK(s.cycle_length() == static_cast<std::uint64_t>(tau.denominator()));
    Rational sum(0);
    std::uint64_t highs = 0;
    for (std::uint64_t k = 0; k < s.cycle_length(); ++k) {
      const auto th = s.threshold_for(k);
      CHECK((th == s.low_threshold() || th == s.high_threshold()));
      CHECK(s.threshold_for(k) == s.threshold_for(k + s.cycle_length()));
      if (th == s.high_threshold() && !tau.is_integer()) ++highs;
      sum += static_cast<std::int64_t>(th);
    }
    CHECK(sum / static_cast<std::int64_t>(s.cycle_length()) == tau.rational());
    if (!tau.is_integer()) CHECK(highs == s.high_count());
  }
}

TEST_CASE("rationalize") {
  CHECK(rationalize(2.5, 1000) == RationalThreshold(5, 2));
  CHECK(rationalize(40.0 / 21.0, 1'000'000) == RationalThreshold(40, 21));
  CHECK(rationalize(M_PI, 10) == RationalThreshold(22, 7));
  CHECK(rationalize(M_PI, 1000) == RationalThreshold(355, 113));
  CHECK(rationalize(0.0, 10) == RationalThreshold::integer(0));
  CHECK(rationalize(7.0, 10) == RationalThreshold::integer(7));
}

TEST_CASE("property: rationalize is a best approximation") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const double x = u(rng);
    const std::int64_t max_den = 50;
    const auto r = rationalize(x, max_den);
    CHECK(r.denominator() <= max_den);
    const double err = std::abs(r.value() - x);
    for (std::int64_t d = 1; d <= max_den; ++d) {
      const double n = std::round(x * static_cast<double>(d));
      CHECK(err <= std::abs(n / static_cast<double>(d) - x) + 1e-15);
    }
  }
}

TEST_CASE("optimize_scheme covers every scheme") {
  for (double lambda : {0.2, 0.7})
    for (double q : {0.1, 0.5, 0.9})
      for (Scheme s : kAllSchemes) {
        const auto o = optimize_scheme(s, params(s, lambda, q));
        CHECK(std::isfinite(o.aoi));
        CHECK(o.aoi >= 0.5);
        CHECK(is_threshold_scheme(s) == !std::holds_alternative<std::monostate>(o.tau));
      }
  const auto sat = optimize_scheme(Scheme::AAinf, params(Scheme::AAinf, 0.5, 0.8));
  CHECK(sat.aoi == doctest::Approx((2 - 0.5) / (2 * 0.5)));
}
