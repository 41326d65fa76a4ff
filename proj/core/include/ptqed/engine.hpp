// engine.hpp -- orchestration above the numerics: automatic time-step and
// window selection, influence-tensor construction with an optional on-disk
// cache, decay-truncated dynamics, and refinement of run settings.
#pragma once

#include <filesystem>

#include "ptqed/bath.hpp"
#include "ptqed/ptensor.hpp"
#include "ptqed/system.hpp"

namespace ptqed::engine {

struct SimulationSettings {
  bath::BathSpec bath;
  sys::SystemParams system;
  double dt = 0.0;                 // 0 -> auto_time_step
  double t_max = 0.0;              // 0 -> stop at population decay, capped at max_steps
  int max_steps = 2000;            // window cap when t_max is automatic
  double svd_cutoff = 1e-7;        // influence-tensor truncation threshold
  double memory_tolerance = 1e-7;  // kernel-lag truncation threshold
  int bond_cap = 512;
  std::filesystem::path cache_dir;  // empty -> no on-disk tensor cache

  void validate() const;
};

// Time step resolving the fastest class-mixing scale.  The cavity loss and
// detuning commute with the phonon coupling, so they enter with reduced
// weight; a decoupled bath (alpha = 0) drops the cutoff scale entirely
// because the split-step evolution is then exact at any dt.
double auto_time_step(const sys::SystemParams& system, const bath::BathSpec& bath);

struct Prepared {
  double dt = 0.0;
  int steps = 0;             // built window length
  bool window_is_auto = false;
  bath::MemoryKernel kernel;
  pt::ProcessTensor tensor;
  bool from_cache = false;
};

// Resolve dt and the step window, then build (or load) the influence tensor.
Prepared prepare(const SimulationSettings& settings);

struct Dynamics {
  pt::PopulationSeries populations;  // full built window
  int steps_used = 0;  // decay-truncated length when the window was automatic
  bool decayed = false;  // cavity population fell below 1e-4 of its running max
};

// Populations for the prepared tensor; `system` may differ from the one in
// the settings (the tensor depends only on the bath, dt, and the window).
Dynamics run_populations(const Prepared& prep, const sys::SystemParams& system);

pt::CorrelationGrid run_correlation_grid(const Prepared& prep, const sys::SystemParams& system,
                                         int steps);

// Next rung of the refinement ladder: halved dt, tightened svd cutoff, and
// the window pinned to the already-resolved span so rungs stay comparable.
// `dt_used` and `t_span` come from the previous rung's Prepared/Dynamics.
SimulationSettings refined(const SimulationSettings& settings, double dt_used, double t_span);

}  // namespace ptqed::engine
