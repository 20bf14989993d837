// Data-parallel kernels (OpenMP) and the serial reference versions they are
// tested and benchmarked against.  Every parallel kernel writes into a slot
// indexed by its input position, so results never depend on scheduling.
#pragma once

#include <cstdint>
#include <vector>

#include "aoi/core.hpp"
#include "aoi/simulator.hpp"

namespace aoi::kernels {

/// Average age of P1 or F1 at every tau in [0, tau_max].  jobs <= 0 uses the
/// OpenMP default thread count.
std::vector<double> threshold_grid(Scheme scheme, const SystemParams& params, std::uint64_t tau_max, int jobs = 0);
std::vector<double> threshold_grid_serial(Scheme scheme, const SystemParams& params, std::uint64_t tau_max);

/// Independent simulation runs, one per config.
std::vector<SimResult> simulate_many(const std::vector<SimConfig>& configs, int jobs = 0);
std::vector<SimResult> simulate_many_serial(const std::vector<SimConfig>& configs);

}  // namespace aoi::kernels
