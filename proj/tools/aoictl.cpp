// aoictl: evaluate, optimize, sweep and simulate age-threshold receiver
// policies.  Exit status: 0 success, 1 a checked claim failed, 2 usage or
// configuration error.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"
#include "aoi/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitClaimFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string lambda = "0.7";
  std::string q = "0.5";
  std::string scheme;
  std::string tau;
  std::uint64_t slots = 0;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string out;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// "--config FILE" expands to "--key=value" tokens placed right after the
// subcommand, so flags given on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config") continue;
    if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file");
    std::ifstream in(args[i + 1]);
    if (!in) throw std::invalid_argument("cannot read config " + args[i + 1]);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
      from_file.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    --i;
  }
  if (!from_file.empty() && !args.empty()) args.insert(args.begin() + 1, from_file.begin(), from_file.end());
  return args;
}

aoi::Scheme scheme_of(const std::string& name) {
  if (auto s = aoi::parse_scheme(name)) return *s;
  throw std::invalid_argument("unknown scheme '" + name + "' (P1, F1, Pinf, Finf, B0, AA1, AAinf)");
}

std::vector<aoi::Scheme> schemes_of(const std::string& list) {
  if (list.empty() || list == "all") return {aoi::kAllSchemes.begin(), aoi::kAllSchemes.end()};
  std::vector<aoi::Scheme> out;
  for (const auto& name : split(list, ',')) out.push_back(scheme_of(name));
  return out;
}

// "0.1,0.2,0.3" or "first:last:step".
std::vector<double> grid_of(const std::string& text) {
  if (text.empty()) return aoi::default_q_grid();
  const auto range = split(text, ':');
  if (range.size() == 3)
    return aoi::make_q_grid(aoi::Probability::parse(range[0]).value, aoi::Probability::parse(range[1]).value,
                            std::stod(range[2]));
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(aoi::Probability::parse(item).value);
  return out;
}

aoi::ThresholdSpec threshold_of(const std::string& text) {
  if (text.empty()) return std::monostate{};
  const auto p = aoi::Probability::parse(text);  // same "a/b" syntax
  const auto r = p.exact ? *p.exact : aoi::rationalize(p.value, aoi::kDefaultMaxDenominator).rational();
  const aoi::RationalThreshold tau(r);
  if (tau.is_integer()) return static_cast<std::uint64_t>(tau.numerator());
  return tau;
}

aoi::SystemParams params_of(const Options& o, aoi::Scheme s) {
  return aoi::validate_params(aoi::Probability::parse(o.lambda), aoi::Probability::parse(o.q),
                              aoi::required_battery(s), s);
}

std::ostream& output(const Options& o, std::ofstream& file) {
  if (o.out.empty()) return std::cout;
  file.open(o.out, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + o.out);
  return file;
}

int cmd_eval(const Options& o) {
  const auto s = scheme_of(o.scheme);
  const auto params = params_of(o, s);
  auto tau = threshold_of(o.tau);
  aoi::SweepRow row{s, params.q(), params.lambda(), std::nullopt, 0.0, std::nullopt, std::nullopt, o.seed, o.slots};
  if (std::holds_alternative<std::monostate>(tau) && aoi::is_threshold_scheme(s)) {
    const auto opt = aoi::optimize_scheme(s, params);
    tau = std::visit([](const auto& t) -> aoi::ThresholdSpec { return t; }, opt.tau);
  }
  if (const auto* n = std::get_if<std::uint64_t>(&tau)) {
    row.tau_star = static_cast<double>(*n);
    row.aoi_analytic = aoi::is_b1_threshold(s) ? aoi::closed_form_aoi(s, params, *n)
                                               : aoi::mixed_threshold_aoi(s, params, aoi::RationalThreshold::integer(*n));
  } else if (const auto* r = std::get_if<aoi::RationalThreshold>(&tau)) {
    if (!aoi::is_unbounded_threshold(s)) throw std::invalid_argument("fractional thresholds need Pinf or Finf");
    row.tau_star = r->value();
    row.aoi_analytic = aoi::mixed_threshold_aoi(s, params, *r);
  } else {
    row.aoi_analytic = aoi::optimize_scheme(s, params).aoi;
  }
  if (o.slots > 0) {
    const auto sim = aoi::simulate(aoi::SimConfig{params, s, tau, aoi::SlotHorizon{o.slots}, o.seed});
    row.aoi_sim = sim.estimate.value;
    row.ci_halfwidth = sim.estimate.ci_halfwidth;
  }
  std::ofstream file;
  aoi::write_csv(output(o, file), {row});
  return kExitOk;
}

int cmd_optimize(const Options& o) {
  const auto s = scheme_of(o.scheme);
  const auto params = params_of(o, s);
  std::ofstream file;
  auto& out = output(o, file);
  out << "scheme: " << aoi::to_string(s) << "\nq: " << aoi::format_number(params.q())
      << "\nlambda: " << aoi::format_number(params.lambda()) << '\n';
  if (aoi::is_b1_threshold(s)) {
    const auto r = aoi::optimize_threshold_b1(s, params);
    out << "tau_star: " << r.tau_star << "\naoi_star: " << aoi::format_number(r.aoi_star)
        << "\nsearch_bound: " << r.search_bound_used << "\nties:";
    for (auto t : r.ties) out << ' ' << t;
    out << '\n';
  } else if (aoi::is_unbounded_threshold(s)) {
    const auto tau = aoi::optimal_threshold_binf(s, params);
    const auto mix = aoi::mixing_schedule(tau);
    out << "tau_star: " << tau.to_string() << " (" << aoi::format_number(tau.value()) << ")"
        << "\naoi_star: " << aoi::format_number(aoi::mixed_threshold_aoi(s, params, tau))
        << "\naoi_real_tau: " << aoi::format_number(aoi::real_threshold_aoi(s, params, tau.value()))
        << "\nalways_on: " << (params.always_on() ? "yes" : "no") << "\nschedule: " << mix.low_threshold() << " x"
        << mix.low_count() << ", " << mix.high_threshold() << " x" << mix.high_count() << " per "
        << mix.cycle_length() << " receptions\n";
  } else {
    out << "tau_star: none\naoi_star: " << aoi::format_number(aoi::optimize_scheme(s, params).aoi) << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, const std::string& schemes, const std::string& q_grid) {
  aoi::SweepSpec spec;
  spec.lambda = aoi::Probability::parse(o.lambda).value;
  spec.q_grid = grid_of(q_grid);
  spec.schemes = schemes_of(schemes);
  spec.sim_slots = o.slots;
  spec.seed = o.seed;
  spec.jobs = o.jobs;
  if (o.out.empty()) {
    aoi::write_csv(std::cout, aoi::run_sweep(spec));
  } else {
    spec.output_path = o.out;
    aoi::run_sweep_to_file(spec);
  }
  return kExitOk;
}

int cmd_figures(const Options& o) {
  const auto report =
      aoi::reproduce_figures(o.out.empty() ? "figures" : o.out, aoi::FigureOptions{o.slots, o.seed, o.jobs});
  report.write(std::cout);
  return report.passed() ? kExitOk : kExitClaimFailed;
}

int cmd_validate(const Options& o) {
  const auto report = aoi::validate(o.out.empty() ? "validation.txt" : o.out, o.slots, o.seed, o.jobs);
  report.write(std::cout);
  return report.passed() ? kExitOk : kExitClaimFailed;
}

int cmd_trace(const Options& o) {
  const auto s = scheme_of(o.scheme);
  const auto params = params_of(o, s);
  auto tau = threshold_of(o.tau);
  if (std::holds_alternative<std::monostate>(tau) && aoi::is_threshold_scheme(s)) {
    const auto opt = aoi::optimize_scheme(s, params);
    tau = std::visit([](const auto& t) -> aoi::ThresholdSpec { return t; }, opt.tau);
  }
  std::ofstream file;
  auto& out = output(o, file);
  out << "t,S,E,B,D,received,age\n";
  aoi::SimConfig config{params, s, tau, aoi::SlotHorizon{o.slots}, o.seed};
  config.trace = [&out](const aoi::SlotRecord& r) {
    out << r.t << ',' << r.update << ',' << r.energy << ',' << r.battery << ',' << r.on << ',' << r.received << ','
        << r.age << '\n';
  };
  try {
    aoi::simulate(config);
  } catch (const std::runtime_error&) {
    // A short trace may end before the first reception; the trace is still valid.
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-threshold ON/OFF control at an energy harvesting receiver"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Options o;
  std::string schemes;
  std::string q_grid;
  const auto point_options = [&o](CLI::App* sub, bool need_scheme) {
    auto* opt = sub->add_option("--scheme", o.scheme, "P1, F1, Pinf, Finf, B0, AA1 or AAinf");
    if (need_scheme) opt->required();
    sub->add_option("--lambda", o.lambda, "update probability per slot (decimal or a/b)");
    sub->add_option("--q", o.q, "energy probability per slot (decimal or a/b)");
  };

  auto* eval = app.add_subcommand("eval", "average age of one scheme at one point");
  point_options(eval, true);
  eval->add_option("--tau", o.tau, "threshold (integer, or a/b for Pinf/Finf); default: optimal");
  eval->add_option("--slots", o.slots, "simulation slots (0: analytic only)");
  eval->add_option("--seed", o.seed);
  eval->add_option("--out", o.out, "CSV output path (default stdout)");

  auto* optimize = app.add_subcommand("optimize", "optimal threshold of one scheme");
  point_options(optimize, true);
  optimize->add_option("--out", o.out);

  auto* sweep = app.add_subcommand("sweep", "CSV over a q grid");
  sweep->add_option("--scheme", schemes, "comma-separated schemes or 'all'");
  sweep->add_option("--lambda", o.lambda);
  sweep->add_option("--q", q_grid, "q grid: 'a,b,c' or 'first:last:step' (default 0.1:0.9:0.1)");
  sweep->add_option("--slots", o.slots, "simulation slots per point (0: analytic only)");
  sweep->add_option("--seed", o.seed);
  sweep->add_option("--jobs", o.jobs, "concurrent points (0: all cores)");
  sweep->add_option("--out", o.out, "CSV output path (default stdout)");

  auto* figures = app.add_subcommand("figures", "write fig3.csv, fig4.csv and report.txt");
  figures->add_option("--slots", o.slots);
  figures->add_option("--seed", o.seed);
  figures->add_option("--jobs", o.jobs);
  figures->add_option("--out", o.out, "output directory (default ./figures)");

  auto* validate = app.add_subcommand("validate", "oracle / closed form / simulation agreement report");
  validate->add_option("--slots", o.slots, "simulation slots per case (default 1e6)");
  validate->add_option("--seed", o.seed);
  validate->add_option("--jobs", o.jobs);
  validate->add_option("--out", o.out, "report path (default validation.txt)");

  auto* trace = app.add_subcommand("trace", "per-slot debug trace t,S,E,B,D,received,age");
  point_options(trace, true);
  trace->add_option("--tau", o.tau);
  trace->add_option("--slots", o.slots, "slots to trace (default 100)");
  trace->add_option("--seed", o.seed);
  trace->add_option("--out", o.out);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::vector<std::string>(args.begin() + 1, args.end()));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*eval) return cmd_eval(o);
    if (*optimize) return cmd_optimize(o);
    if (*sweep) return cmd_sweep(o, schemes, q_grid);
    if (*figures) return cmd_figures(o);
    if (*validate) {
      if (validate->count("--slots") == 0) o.slots = 1'000'000;
      return cmd_validate(o);
    }
    if (*trace) {
      if (trace->count("--slots") == 0) o.slots = 100;
      return cmd_trace(o);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
