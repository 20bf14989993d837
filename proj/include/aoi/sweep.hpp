// Parameter sweeps, figure reproduction and the three-way validation report
// behind the command-line front end.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aoi/core.hpp"

namespace aoi {

struct SweepSpec {
  double lambda = 0.7;
  std::vector<double> q_grid;
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::uint64_t sim_slots = 0;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::filesystem::path output_path;
};

/// q in {0.1, 0.2, ..., 0.9}.
std::vector<double> default_q_grid();
/// q in {first, first + step, ...} up to last (inclusive, within 1e-9).
std::vector<double> make_q_grid(double first, double last, double step);

/// Throws std::invalid_argument when the grid is empty, not strictly
/// increasing, or leaves (0, 1).
void check_sweep_spec(const SweepSpec& spec);

struct SweepRow {
  Scheme scheme = Scheme::P1;
  double q = 0.0;
  double lambda = 0.0;
  std::optional<double> tau_star;
  double aoi_analytic = 0.0;
  std::optional<double> aoi_sim;
  std::optional<double> ci_halfwidth;
  std::uint64_t seed = 0;
  std::uint64_t slots = 0;
};

/// Evaluates one (scheme, q) point at the scheme's optimal threshold and,
/// when sim_slots > 0, simulates it with the given seed.
SweepRow evaluate_point(Scheme scheme, double lambda, double q, std::uint64_t sim_slots, std::uint64_t seed);

/// Rows sorted by scheme, then q.  Points run concurrently up to spec.jobs.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kCsvHeader = "scheme,q,lambda,tau_star,aoi_analytic,aoi_sim,ci_halfwidth,seed,slots";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// run_sweep + write_csv to spec.output_path.  Throws std::runtime_error if
/// the file cannot be written.
std::vector<SweepRow> run_sweep_to_file(const SweepSpec& spec);

/// Formats a number with 9 significant digits.
std::string format_number(double x);

struct Claim {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<Claim> claims;
  bool passed() const;
  void write(std::ostream& out) const;
};

struct FigureOptions {
  std::uint64_t sim_slots = 0;
  std::uint64_t seed = 1;
  int jobs = 0;
};

/// Writes fig3.csv (lambda = 0.7), fig4.csv (lambda = 0.2) and report.txt
/// with the qualitative comparisons between schemes.
Report reproduce_figures(const std::filesystem::path& out_dir, const FigureOptions& options = {});

/// Checks closed forms against the oracle, the scheme-reduction identities,
/// and simulation against the closed forms.  Writes one line per case.
Report validate(const std::filesystem::path& out_path, std::uint64_t sim_slots = 1'000'000, std::uint64_t seed = 1,
                int jobs = 0);

}  // namespace aoi
