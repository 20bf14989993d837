#include "aoi/kernels.hpp"

#include <exception>
#include <stdexcept>

#include <omp.h>

#include "aoi/analytic.hpp"

namespace aoi::kernels {

namespace {

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

}  // namespace

std::vector<double> threshold_grid_serial(Scheme scheme, const SystemParams& params, std::uint64_t tau_max) {
  std::vector<double> out(tau_max + 1);
  for (std::uint64_t tau = 0; tau <= tau_max; ++tau) out[tau] = closed_form_aoi(scheme, params, tau);
  return out;
}

std::vector<double> threshold_grid(Scheme scheme, const SystemParams& params, std::uint64_t tau_max, int jobs) {
  if (!is_b1_threshold(scheme)) throw std::invalid_argument("threshold grid applies to P1 and F1 only");
  std::vector<double> out(tau_max + 1);
  const auto n = static_cast<std::int64_t>(tau_max) + 1;
#pragma omp parallel for schedule(static) num_threads(thread_count(jobs))
  for (std::int64_t tau = 0; tau < n; ++tau)
    out[static_cast<std::size_t>(tau)] = closed_form_aoi(scheme, params, static_cast<std::uint64_t>(tau));
  return out;
}

std::vector<SimResult> simulate_many_serial(const std::vector<SimConfig>& configs) {
  std::vector<SimResult> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(simulate(c));
  return out;
}

std::vector<SimResult> simulate_many(const std::vector<SimConfig>& configs, int jobs) {
  std::vector<SimResult> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = simulate(configs[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace aoi::kernels
