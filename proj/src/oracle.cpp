#include "aoi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoi {

namespace {

// Upper bounds on P(excluded), E[V; excluded] and E[V^2; excluded].
struct Tail {
  double mass = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

Tail operator+(const Tail& a, const Tail& b) { return {a.mass + b.mass, a.m1 + b.m1, a.m2 + b.m2}; }
Tail operator*(double s, const Tail& t) { return {s * t.mass, s * t.m1, s * t.m2}; }

// Mass times the moments of K + G, G geometric(p) on {1, 2, ...}.  By
// memorylessness this is exactly the tail of a geometric variable cut at K.
Tail shifted_geometric(double mass, double k, double p) {
  return {mass, mass * (k + 1.0 / p), mass * (k * k + 2.0 * k / p + (2.0 - p) / (p * p))};
}

// A finite support with probabilities and a certified bound on what was cut.
struct Lattice {
  std::vector<double> value;
  std::vector<double> prob;
  Tail tail;

  long double partial(int power) const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < value.size(); ++i) s += prob[i] * std::pow(static_cast<long double>(value[i]), power);
    return s;
  }
};

std::uint64_t initial_range(double p, double tol) {
  if (p >= 1.0) return 1;
  return static_cast<std::uint64_t>(std::ceil(std::log(tol * 1e-3) / std::log1p(-p))) + 1;
}

void check_range(std::uint64_t k) {
  if (k > kOracleRangeCap)
    throw std::runtime_error("oracle truncation range " + std::to_string(k) + " exceeds cap " +
                             std::to_string(kOracleRangeCap) + "; loosen tol");
}

// X = max(tau, I_A), I_A geometric(q) on {1, ..., k}.
Lattice wait_lattice(double q, std::uint64_t tau, std::uint64_t k) {
  k = std::max<std::uint64_t>({k, tau, 1});
  check_range(k);
  Lattice l;
  double p = q;
  for (std::uint64_t a = 1; a <= k; ++a) {
    l.value.push_back(static_cast<double>(std::max(a, tau)));
    l.prob.push_back(p);
    p *= 1.0 - q;
  }
  l.tail = shifted_geometric(std::pow(1.0 - q, static_cast<double>(k)), static_cast<double>(k), q);
  return l;
}

// Geometric(p) on {start, ..., k}.
Lattice geometric_lattice(double p, int start, std::uint64_t k) {
  check_range(k);
  Lattice l;
  double w = p;
  for (std::uint64_t b = static_cast<std::uint64_t>(start); b <= k; ++b) {
    l.value.push_back(static_cast<double>(b));
    l.prob.push_back(w);
    w *= 1.0 - p;
  }
  const double cut_exponent = static_cast<double>(k) + (start == 0 ? 1.0 : 0.0);
  l.tail = shifted_geometric(std::pow(1.0 - p, cut_exponent), static_cast<double>(k), p);
  return l;
}

// S = I_A2 + ... + I_AN with N geometric(lambda) on {1, 2, ...}: a mixture
// over M = N - 1 of negative binomials NB(M, q), M cut at max_m and S cut
// at max_s.
Lattice retrial_lattice(double q, double lambda, std::uint64_t max_m, std::uint64_t max_s) {
  check_range(max_m);
  check_range(max_s);
  Lattice l;
  std::vector<double> pmf(max_s + 1, 0.0);
  pmf[0] = lambda;
  const double log_fail = std::log1p(-q);
  double weight = lambda;
  for (std::uint64_t m = 1; m <= max_m && m <= max_s; ++m) {
    weight *= 1.0 - lambda;  // P(M = m)
    // log NB(s | m) = log C(s-1, m-1) + m log q + (s - m) log(1 - q), stepped in s.
    double log_nb = static_cast<double>(m) * std::log(q);
    for (std::uint64_t s = m; s <= max_s; ++s) {
      pmf[s] += weight * std::exp(log_nb);
      log_nb += std::log(static_cast<double>(s)) - std::log(static_cast<double>(s - m + 1)) + log_fail;
    }
  }
  for (std::uint64_t s = 0; s <= max_s; ++s) {
    l.value.push_back(static_cast<double>(s));
    l.prob.push_back(pmf[s]);
  }

  // Cut 1: M > max_m.  E[S | m] = m/q and E[S^2 | m] = (m (1-q) + m^2)/q^2.
  const double km = static_cast<double>(max_m);
  const Tail m_tail = shifted_geometric(std::pow(1.0 - lambda, km + 1.0), km, lambda);
  const Tail cut_m{m_tail.mass, m_tail.m1 / q, ((1.0 - q) * m_tail.m1 + m_tail.m2) / (q * q)};
  // Cut 2: S > max_s.  Given a failed first trial, S is geometric(q lambda).
  const double ql = q * lambda;
  const double ks = static_cast<double>(max_s);
  const Tail cut_s = (1.0 - lambda) * shifted_geometric(std::pow(1.0 - ql, ks), ks, ql);
  l.tail = cut_m + cut_s;
  return l;
}

struct Summed {
  double mean = 0.0;
  double second = 0.0;
  double rel_bound = 0.0;
  std::uint64_t terms = 0;
};

double rel(double err, double v) { return v > 0.0 ? err / v : err; }

Summed single(const Lattice& t) {
  const auto m1 = static_cast<double>(t.partial(1));
  const auto m2 = static_cast<double>(t.partial(2));
  return {m1, m2, std::max(rel(t.tail.m1, m1), rel(t.tail.m2, m2)), t.value.size()};
}

// Moments of X + Y for independent X, Y by summing over every lattice pair.
Summed sum_of(const Lattice& x, const Lattice& y) {
  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t i = 0; i < x.value.size(); ++i) {
    for (std::size_t j = 0; j < y.value.size(); ++j) {
      const long double v = static_cast<long double>(x.value[i]) + y.value[j];
      const long double w = static_cast<long double>(x.prob[i]) * y.prob[j];
      s1 += w * v;
      s2 += w * v * v;
    }
  }
  // Full-moment upper bounds: partial sums plus the cut tails.
  const auto mx1 = static_cast<double>(x.partial(1)) + x.tail.m1;
  const auto mx2 = static_cast<double>(x.partial(2)) + x.tail.m2;
  const auto my1 = static_cast<double>(y.partial(1)) + y.tail.m1;
  const auto my2 = static_cast<double>(y.partial(2)) + y.tail.m2;
  const Tail& tx = x.tail;
  const Tail& ty = y.tail;
  const double err1 = (tx.m1 + tx.mass * my1) + (ty.mass * mx1 + ty.m1);
  const double err2 = (tx.m2 + 2.0 * tx.m1 * my1 + tx.mass * my2) + (ty.mass * mx2 + 2.0 * mx1 * ty.m1 + ty.m2);
  const auto m1 = static_cast<double>(s1);
  const auto m2 = static_cast<double>(s2);
  return {m1, m2, std::max(rel(err1, m1), rel(err2, m2)), x.value.size() * y.value.size()};
}

}  // namespace

TruncatedMoments enum_renewal_moments(Scheme scheme, double q, double lambda, std::uint64_t tau, double tol) {
  if (!(q > 0.0 && q <= 1.0) || !(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("q and lambda must lie in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if ((scheme == Scheme::B0 || scheme == Scheme::AA1) && tau != 0)
    throw std::invalid_argument(std::string(to_string(scheme)) + " takes no threshold");

  std::uint64_t ka = initial_range(q, tol);
  std::uint64_t kb = lambda >= 1.0 ? 0 : initial_range(lambda, tol);
  std::uint64_t ks = lambda >= 1.0 ? 0 : initial_range(q * lambda, tol);
  std::uint64_t k0 = initial_range(q * lambda, tol);

  for (;;) {
    Summed s;
    switch (scheme) {
      case Scheme::P1:
      case Scheme::AA1:
        s = sum_of(wait_lattice(q, tau, ka), geometric_lattice(lambda, 0, kb));
        break;
      case Scheme::F1:
        s = sum_of(wait_lattice(q, tau, ka), retrial_lattice(q, lambda, kb, ks));
        break;
      case Scheme::B0:
        s = single(geometric_lattice(q * lambda, 1, k0));
        break;
      default:
        throw std::invalid_argument("no enumeration oracle for scheme " + std::string(to_string(scheme)));
    }
    if (s.rel_bound <= tol) return {s.mean, s.second, s.rel_bound, s.terms};
    ka *= 2;
    kb = std::max<std::uint64_t>(2 * kb, 1);
    ks = std::max<std::uint64_t>(2 * ks, 1);
    k0 *= 2;
  }
}

}  // namespace aoi
