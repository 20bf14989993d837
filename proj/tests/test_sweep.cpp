#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aoi/sweep.hpp"

using namespace aoi;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "aoi_test_sweep";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("q grids") {
  const auto g = default_q_grid();
  REQUIRE(g.size() == 9);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 0.9);
  CHECK(g[2] == 0.3);
  CHECK(make_q_grid(0.05, 0.95, 0.05).size() == 19);
  CHECK_THROWS_AS(make_q_grid(0.1, 0.9, 0.0), std::invalid_argument);
}

TEST_CASE("sweep CSV shape") {
  SweepSpec spec;
  spec.lambda = 0.7;
  spec.q_grid = {0.3, 0.5};
  spec.sim_slots = 10'000;
  const auto rows = run_sweep(spec);
  CHECK(rows.size() == 14);
  std::ostringstream out;
  write_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(n == 14);
  for (const auto& r : rows) {
    CHECK(r.aoi_sim.has_value());
    CHECK(r.slots == 10'000);
    CHECK(r.tau_star.has_value() == is_threshold_scheme(r.scheme));
  }
}

TEST_CASE("B0 sweep row") {
  SweepSpec spec;
  spec.lambda = 0.7;
  spec.q_grid = {0.5};
  spec.schemes = {Scheme::B0};
  std::ostringstream out;
  write_csv(out, run_sweep(spec));
  CHECK(out.str() == std::string(kCsvHeader) + "\nB0,0.5,0.7,,2.35714286,,,1,0\n");
}

TEST_CASE("sweep output is byte-stable") {
  SweepSpec spec;
  spec.lambda = 0.2;
  spec.q_grid = {0.1, 0.15};
  spec.sim_slots = 20'000;
  spec.seed = 77;
  spec.output_path = scratch("a.csv");
  run_sweep_to_file(spec);
  spec.output_path = scratch("b.csv");
  spec.jobs = 1;
  run_sweep_to_file(spec);
  CHECK(slurp(scratch("a.csv")) == slurp(scratch("b.csv")));
  CHECK_FALSE(slurp(scratch("a.csv")).empty());
}

TEST_CASE("invalid sweep specs") {
  SweepSpec spec;
  CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
  spec.q_grid = {0.5, 0.4};
  CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
  spec.q_grid = {0.5, 1.0};
  CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
  spec.q_grid = {0.5};
  spec.lambda = 0.0;
  CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
  spec.lambda = 0.5;
  spec.schemes.clear();
  CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
  spec.schemes = {Scheme::P1};
  spec.output_path = "/nonexistent-dir/x.csv";
  CHECK_THROWS_AS(run_sweep_to_file(spec), std::runtime_error);
}

TEST_CASE("report formatting") {
  Report r;
  r.claims.push_back({"first", true, "ok"});
  r.claims.push_back({"second", false, "bad"});
  CHECK_FALSE(r.passed());
  std::ostringstream out;
  r.write(out);
  CHECK(out.str().find("PASS first") != std::string::npos);
  CHECK(out.str().find("FAIL second") != std::string::npos);
}
