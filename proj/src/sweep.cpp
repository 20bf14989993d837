#include "aoi/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "aoi/analytic.hpp"
#include "aoi/kernels.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/oracle.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

namespace {

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

ThresholdSpec to_threshold_spec(const SchemeOptimum& opt) {
  return std::visit([](const auto& t) -> ThresholdSpec { return t; }, opt.tau);
}

std::optional<double> tau_value(const SchemeOptimum& opt) {
  if (const auto* n = std::get_if<std::uint64_t>(&opt.tau)) return static_cast<double>(*n);
  if (const auto* r = std::get_if<RationalThreshold>(&opt.tau)) return r->value();
  return std::nullopt;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

std::vector<double> make_q_grid(double first, double last, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double q = std::round((first + i * step) * 1e9) / 1e9;
    if (q > last + 1e-9) break;
    grid.push_back(q);
  }
  return grid;
}

std::vector<double> default_q_grid() { return make_q_grid(0.1, 0.9, 0.1); }

void check_sweep_spec(const SweepSpec& spec) {
  if (!(spec.lambda > 0.0 && spec.lambda <= 1.0)) throw std::invalid_argument("lambda must lie in (0, 1]");
  if (spec.q_grid.empty()) throw std::invalid_argument("q grid is empty");
  for (std::size_t i = 0; i < spec.q_grid.size(); ++i) {
    const double q = spec.q_grid[i];
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q grid values must lie in (0, 1)");
    if (i > 0 && !(q > spec.q_grid[i - 1])) throw std::invalid_argument("q grid must be strictly increasing");
  }
  if (spec.schemes.empty()) throw std::invalid_argument("no schemes selected");
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

SweepRow evaluate_point(Scheme scheme, double lambda, double q, std::uint64_t sim_slots, std::uint64_t seed) {
  const auto params = validate_params(lambda, q, required_battery(scheme), scheme);
  const auto opt = optimize_scheme(scheme, params);
  SweepRow row{scheme, q, lambda, tau_value(opt), opt.aoi, std::nullopt, std::nullopt, seed, sim_slots};
  if (sim_slots > 0) {
    SimConfig config{params, scheme, to_threshold_spec(opt), SlotHorizon{sim_slots}, seed};
    const auto sim = simulate(config);
    row.aoi_sim = sim.estimate.value;
    row.ci_halfwidth = sim.estimate.ci_halfwidth;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  check_sweep_spec(spec);
  auto schemes = spec.schemes;
  std::sort(schemes.begin(), schemes.end());
  schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());

  std::vector<std::pair<Scheme, double>> points;
  for (auto s : schemes)
    for (double q : spec.q_grid) points.emplace_back(s, q);

  std::vector<SweepRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(spec.jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      rows[k] = evaluate_point(points[k].first, spec.lambda, points[k].second, spec.sim_slots, spec.seed);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.scheme) << ',' << format_number(r.q) << ',' << format_number(r.lambda) << ','
        << optional_field(r.tau_star) << ',' << format_number(r.aoi_analytic) << ',' << optional_field(r.aoi_sim)
        << ',' << optional_field(r.ci_halfwidth) << ',' << r.seed << ',' << r.slots << '\n';
  }
}

std::vector<SweepRow> run_sweep_to_file(const SweepSpec& spec) {
  auto out = open_for_writing(spec.output_path);
  auto rows = run_sweep(spec);
  write_csv(out, rows);
  if (!out) throw std::runtime_error("write failed: " + spec.output_path.string());
  return rows;
}

bool Report::passed() const {
  return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.passed; });
}

void Report::write(std::ostream& out) const {
  for (const auto& c : claims) out << (c.passed ? "PASS " : "FAIL ") << c.name << " -- " << c.detail << '\n';
  out << (passed() ? "ALL PASS" : "SOME CLAIMS FAILED") << '\n';
}

namespace {

using Curve = std::map<Scheme, std::vector<double>>;  // analytic value per q index

Curve curves_of(const std::vector<SweepRow>& rows, std::size_t grid_size) {
  Curve c;
  for (std::size_t i = 0; i < rows.size(); ++i) c[rows[i].scheme].push_back(rows[i].aoi_analytic);
  for (auto& [s, v] : c)
    if (v.size() != grid_size) throw std::logic_error("incomplete sweep");
  return c;
}

// Worst relative gap |a/b - 1| over the q values that satisfy keep.
template <typename Keep>
Claim within(const std::string& name, const std::vector<double>& grid, const std::vector<double>& a,
             const std::vector<double>& b, double tol, Keep keep) {
  double worst = 0.0;
  double at = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!keep(grid[i])) continue;
    const double r = relative(a[i], b[i]);
    if (r > worst) {
      worst = r;
      at = grid[i];
    }
  }
  return {name, worst <= tol,
          "worst relative gap " + format_number(worst) + " at q=" + format_number(at) + " (limit " +
              format_number(tol) + ")"};
}

// a <= b (with round-off slack) over the q values that satisfy keep.
template <typename Keep>
Claim dominates(const std::string& name, const std::vector<double>& grid, const std::vector<double>& a,
                const std::vector<double>& b, Keep keep) {
  std::string violations;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!keep(grid[i])) continue;
    if (a[i] > b[i] * (1.0 + 1e-12)) violations += " q=" + format_number(grid[i]);
  }
  return {name, violations.empty(), violations.empty() ? "holds at every checked q" : "violated at" + violations};
}

}  // namespace

Report reproduce_figures(const std::filesystem::path& out_dir, const FigureOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto grid = make_q_grid(0.05, 0.95, 0.05);
  const auto all = [](double) { return true; };

  Report report;
  double worst_mix = 0.0;
  std::string worst_mix_at;
  for (double lambda : {0.7, 0.2}) {
    SweepSpec spec;
    spec.lambda = lambda;
    spec.q_grid = grid;
    spec.sim_slots = options.sim_slots;
    spec.seed = options.seed;
    spec.jobs = options.jobs;
    spec.output_path = out_dir / (lambda > 0.5 ? "fig3.csv" : "fig4.csv");
    const auto rows = run_sweep_to_file(spec);
    auto c = curves_of(rows, grid.size());
    const std::string tag = "lambda=" + format_number(lambda) + ": ";
    const auto below_lambda = [lambda](double q) { return q < lambda; };
    const auto low_rate_range = [lambda](double q) { return q <= std::min(0.95, lambda - 0.01) + 1e-12; };

    if (lambda > 0.5) {
      report.claims.push_back(dominates(tag + "P1* <= AA1", grid, c[Scheme::P1], c[Scheme::AA1], all));
      report.claims.push_back(
          dominates(tag + "Pinf* <= AAinf for q < lambda", grid, c[Scheme::Pinf], c[Scheme::AAinf], below_lambda));
      report.claims.push_back(within(tag + "F1* within 10% of B0", grid, c[Scheme::F1], c[Scheme::B0], 0.10, all));
    } else {
      report.claims.push_back(
          within(tag + "F1 ~ B0: F1* within 2% of B0", grid, c[Scheme::F1], c[Scheme::B0], 0.02, low_rate_range));
      report.claims.push_back(
          within(tag + "AA1 within 2% of AAinf", grid, c[Scheme::AA1], c[Scheme::AAinf], 0.02, low_rate_range));
      report.claims.push_back(dominates(tag + "P1* <= AA1", grid, c[Scheme::P1], c[Scheme::AA1], low_rate_range));
      report.claims.push_back(
          dominates(tag + "Pinf* <= AAinf", grid, c[Scheme::Pinf], c[Scheme::AAinf], low_rate_range));
    }

    for (Scheme s : {Scheme::Pinf, Scheme::Finf}) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto params = validate_params(lambda, grid[i], Battery::Unbounded, s);
        const auto tau = optimal_threshold_binf(s, params);
        const double mixed = mixed_threshold_aoi(s, params, tau);
        const double real = real_threshold_aoi(s, params, tau.value());
        const double r = relative(mixed, real);
        if (r > worst_mix) {
          worst_mix = r;
          worst_mix_at = std::string(to_string(s)) + " lambda=" + format_number(lambda) + " q=" + format_number(grid[i]);
        }
      }
    }
  }
  report.claims.push_back({"real-valued vs mixed rational threshold within 1% (Pinf, Finf)", worst_mix <= 0.01,
                           "worst relative gap " + format_number(worst_mix) +
                               (worst_mix_at.empty() ? std::string() : " at " + worst_mix_at)});

  auto out = open_for_writing(out_dir / "report.txt");
  report.write(out);
  return report;
}

Report validate(const std::filesystem::path& out_path, std::uint64_t sim_slots, std::uint64_t seed, int jobs) {
  auto out = open_for_writing(out_path);
  Report report;

  // Closed forms against the enumeration oracle.
  {
    constexpr double kTol = 1e-9;
    double worst = 0.0;
    int cases = 0;
    out << "# closed form vs oracle: scheme q lambda tau | rel_err(E[T]) rel_err(E[T^2])\n";
    for (Scheme s : {Scheme::P1, Scheme::F1, Scheme::AA1, Scheme::B0}) {
      for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double l : {0.2, 0.5, 0.7, 1.0}) {
          for (std::uint64_t tau : {0, 1, 2, 5, 10}) {
            if (!is_b1_threshold(s) && tau != 0) continue;
            const auto params = validate_params(l, q, required_battery(s), s);
            const auto closed = is_b1_threshold(s) ? renewal_moments(s, params, tau) : renewal_moments(s, params);
            const auto oracle = enum_renewal_moments(s, q, l, tau, kTol * 1e-2);
            const double e1 = relative(oracle.mean, closed.mean);
            const double e2 = relative(oracle.second_moment, closed.second_moment);
            worst = std::max({worst, e1, e2});
            ++cases;
            out << to_string(s) << ' ' << q << ' ' << l << ' ' << tau << " | " << e1 << ' ' << e2 << ' '
                << (std::max(e1, e2) <= kTol ? "PASS" : "FAIL") << '\n';
          }
        }
      }
    }
    report.claims.push_back({"closed form vs oracle (" + std::to_string(cases) + " cases)", worst <= kTol,
                             "worst relative error " + format_number(worst)});
  }

  // Scheme-reduction identities.
  {
    constexpr double kTol = 1e-13;
    double worst = 0.0;
    out << "# identities: q lambda | P1(0) vs AA1, F1(0) vs B0, B0 vs (2-q lambda)/(2 q lambda)\n";
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (double l : {0.2, 0.5, 0.7, 1.0}) {
        const auto p1 = validate_params(l, q, Battery::One, Scheme::P1);
        const auto b0 = validate_params(l, q, Battery::Zero, Scheme::B0);
        const double e1 = relative(closed_form_aoi(Scheme::P1, p1, 0), closed_form_aoi(Scheme::AA1, p1));
        const double e2 = relative(closed_form_aoi(Scheme::F1, p1, 0), closed_form_aoi(Scheme::B0, b0));
        const double e3 = relative(closed_form_aoi(Scheme::B0, b0), (2.0 - q * l) / (2.0 * q * l));
        worst = std::max({worst, e1, e2, e3});
        out << q << ' ' << l << " | " << e1 << ' ' << e2 << ' ' << e3 << '\n';
      }
    }
    report.claims.push_back(
        {"scheme-reduction identities", worst <= kTol, "worst relative error " + format_number(worst)});
  }

  // Simulation against the closed forms at each scheme's optimum.
  if (sim_slots > 0) {
    struct Case {
      std::string label;
      double analytic;
      double tol_rel;
    };
    std::vector<Case> cases;
    std::vector<SimConfig> configs;
    for (double l : {0.2, 0.7}) {
      for (double q : default_q_grid()) {
        for (Scheme s : kAllSchemes) {
          const auto params = validate_params(l, q, required_battery(s), s);
          const auto opt = optimize_scheme(s, params);
          const bool boundary =
              s == Scheme::Finf || (s == Scheme::Pinf && params.q_rational() <= params.lambda_rational());
          const std::string label = std::string(to_string(s)) + " q=" + format_number(q) + " lambda=" + format_number(l);
          cases.push_back({label, opt.aoi, boundary ? 0.03 : 0.01});
          configs.push_back(SimConfig{params, s, to_threshold_spec(opt), SlotHorizon{sim_slots}, seed});
          if (boundary) {
            const auto tau = std::get<RationalThreshold>(opt.tau);
            const RationalThreshold next(tau.rational() + 1);
            cases.push_back({label + " tau*+1", mixed_threshold_aoi(s, params, next), 0.01});
            configs.push_back(SimConfig{params, s, next, SlotHorizon{sim_slots}, seed});
          }
        }
      }
    }
    const auto results = kernels::simulate_many(configs, jobs);
    int failures = 0;
    out << "# simulation vs analytic: case | analytic sim ci | rel_err allowed\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& est = results[i].estimate;
      const double err = std::abs(est.value - cases[i].analytic);
      const double allowed = std::max(3.0 * est.ci_halfwidth, cases[i].tol_rel * cases[i].analytic);
      const bool ok = err <= allowed;
      failures += ok ? 0 : 1;
      out << cases[i].label << " | " << format_number(cases[i].analytic) << ' ' << format_number(est.value) << ' '
          << format_number(est.ci_halfwidth) << " | " << format_number(err / cases[i].analytic) << ' '
          << format_number(allowed / cases[i].analytic) << ' ' << (ok ? "PASS" : "FAIL") << '\n';
    }
    report.claims.push_back({"simulation vs analytic (" + std::to_string(cases.size()) + " cases)", failures == 0,
                             std::to_string(failures) + " cases outside tolerance"});
  }

  out << "# summary\n";
  report.write(out);
  return report;
}

}  // namespace aoi
