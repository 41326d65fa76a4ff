#include "ptqed/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <system_error>

#include "ptqed/errors.hpp"
#include "ptqed/hash.hpp"

namespace ptqed::engine {

namespace {

constexpr int kStepLimit = 8000;        // grid memory grows as steps^2
constexpr int kKernelLagCap = 4000;     // safety cap on memory-kernel depth
constexpr double kDecayFraction = 1e-4; // automatic-window stop criterion

}  // namespace

void SimulationSettings::validate() const {
  bath.validate();
  system.validate();
  if (dt < 0.0) throw std::domain_error("engine: dt must be >= 0 (0 selects automatic)");
  if (t_max < 0.0) throw std::domain_error("engine: t_max must be >= 0 (0 selects automatic)");
  if (max_steps < 1) throw std::domain_error("engine: max_steps must be >= 1");
  if (!(svd_cutoff >= 0.0 && svd_cutoff < 1.0))
    throw std::domain_error("engine: svd_cutoff must lie in [0, 1)");
  if (!(memory_tolerance > 0.0)) throw std::domain_error("engine: memory_tolerance must be > 0");
  if (bond_cap < 4) throw std::domain_error("engine: bond_cap must be >= 4");
}

double auto_time_step(const sys::SystemParams& system, const bath::BathSpec& bath) {
  double scale = std::max({system.g, 0.25 * system.kappa, 0.5 * std::abs(system.delta),
                           system.gamma, system.gamma_star, 0.05});
  if (bath.alpha > 0.0) scale = std::max(scale, bath.xi);
  return 0.1 / scale;
}

Prepared prepare(const SimulationSettings& settings) {
  settings.validate();
  Prepared prep;
  prep.dt = settings.dt > 0.0 ? settings.dt : auto_time_step(settings.system, settings.bath);
  prep.window_is_auto = settings.t_max == 0.0;
  if (prep.window_is_auto) {
    prep.steps = settings.max_steps;
  } else {
    prep.steps = std::max(1, static_cast<int>(std::lround(settings.t_max / prep.dt)));
  }
  if (prep.steps > kStepLimit) {
    throw ResourceError("simulation window of " + std::to_string(prep.steps) +
                        " steps exceeds the limit of " + std::to_string(kStepLimit) +
                        "; increase dt or reduce t_max");
  }

  const int lag_cap = std::min(prep.steps, kKernelLagCap);
  prep.kernel = bath::memory_kernel_auto(prep.dt, settings.memory_tolerance, lag_cap, settings.bath);

  const pt::BuildOptions opts{settings.svd_cutoff, settings.bond_cap};
  std::filesystem::path cache_file;
  std::uint64_t key = 0;
  if (!settings.cache_dir.empty()) {
    key = pt::cache_key(settings.bath, prep.dt, prep.steps, opts);
    cache_file = settings.cache_dir / ("ptq-" + to_hex(key) + ".pt");
    if (auto loaded = pt::load_process_tensor(cache_file, key)) {
      prep.tensor = std::move(*loaded);
      prep.from_cache = true;
      return prep;
    }
  }

  prep.tensor = pt::build_process_tensor(prep.kernel, prep.steps, opts);
  if (!cache_file.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(settings.cache_dir, ec);
    if (!ec) {
      try {
        pt::save_process_tensor(prep.tensor, cache_file, key);
      } catch (const ResourceError&) {
        std::filesystem::remove(cache_file, ec);  // cache is an optimisation only
      }
    }
  }
  return prep;
}

Dynamics run_populations(const Prepared& prep, const sys::SystemParams& system) {
  Dynamics dyn;
  const sys::Propagators props = sys::make_propagators(system, prep.dt);
  dyn.populations = pt::propagate_populations(prep.tensor, props, sys::initial_state(), prep.steps);

  double running_max = 0.0;
  int stop = prep.steps;
  bool decayed = false;
  for (int n = 0; n <= prep.steps; ++n) {
    const double pop = dyn.populations.cavity_population[static_cast<std::size_t>(n)];
    if (running_max > 0.0 && pop < kDecayFraction * running_max) {
      stop = n;
      decayed = true;
      break;
    }
    running_max = std::max(running_max, pop);
  }
  dyn.decayed = decayed;
  dyn.steps_used = (prep.window_is_auto && decayed) ? std::max(1, stop) : prep.steps;
  return dyn;
}

pt::CorrelationGrid run_correlation_grid(const Prepared& prep, const sys::SystemParams& system,
                                         int steps) {
  const sys::Propagators props = sys::make_propagators(system, prep.dt);
  return pt::two_time_correlation_grid(prep.tensor, props, sys::initial_state(), steps);
}

SimulationSettings refined(const SimulationSettings& settings, double dt_used, double t_span) {
  SimulationSettings next = settings;
  next.dt = 0.5 * dt_used;
  next.svd_cutoff = 0.1 * settings.svd_cutoff;
  if (next.t_max == 0.0) next.t_max = t_span;
  return next;
}

}  // namespace ptqed::engine
