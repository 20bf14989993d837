// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "aoi/kernels.hpp"

namespace {

using namespace aoi;

const SystemParams kP1 = validate_params(0.7, 0.05, Battery::One, Scheme::P1);

std::vector<SimConfig> batch(std::size_t n) {
  std::vector<SimConfig> configs;
  for (std::size_t i = 0; i < n; ++i) {
    const Scheme s = kAllSchemes[i % kAllSchemes.size()];
    const ThresholdSpec tau = is_threshold_scheme(s) ? ThresholdSpec{std::uint64_t{2}} : ThresholdSpec{};
    configs.push_back(SimConfig{validate_params(0.7, 0.3, required_battery(s), s), s, tau, SlotHorizon{100'000}, i});
  }
  return configs;
}

void BM_ThresholdGridSerial(benchmark::State& state) {
  const auto tau_max = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::threshold_grid_serial(Scheme::P1, kP1, tau_max));
}

void BM_ThresholdGridParallel(benchmark::State& state) {
  const auto tau_max = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::threshold_grid(Scheme::P1, kP1, tau_max));
}

void BM_SimulateManySerial(benchmark::State& state) {
  const auto configs = batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::simulate_many_serial(configs));
}

void BM_SimulateManyParallel(benchmark::State& state) {
  const auto configs = batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::simulate_many(configs));
}

}  // namespace

BENCHMARK(BM_ThresholdGridSerial)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(BM_ThresholdGridParallel)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(BM_SimulateManySerial)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateManyParallel)->Arg(14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
