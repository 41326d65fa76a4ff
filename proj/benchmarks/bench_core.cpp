// Micro-benchmarks for the dominant cost centers: memory-kernel quadrature,
// influence-tensor construction, contraction, and the variational solver.
#include <benchmark/benchmark.h>

#include "ptqed/bath.hpp"
#include "ptqed/observables.hpp"
#include "ptqed/ptensor.hpp"
#include "ptqed/system.hpp"
#include "ptqed/varpol.hpp"

namespace {

ptqed::bath::BathSpec bench_bath() { return ptqed::bath::BathSpec::gaas_quantum_dot(4.0); }

ptqed::sys::SystemParams bench_system() {
  ptqed::sys::SystemParams p;
  p.g = 2.0;
  p.kappa = 0.5;
  p.gamma = 0.01;
  return p;
}

void BM_MemoryKernel(benchmark::State& state) {
  const auto bath = bench_bath();
  for (auto _ : state) {
    auto kernel = ptqed::bath::memory_kernel(0.05, static_cast<int>(state.range(0)), bath);
    benchmark::DoNotOptimize(kernel.eta.data());
  }
}
BENCHMARK(BM_MemoryKernel)->Arg(32)->Arg(128);

void BM_TensorBuild(benchmark::State& state) {
  const auto bath = bench_bath();
  const auto kernel = ptqed::bath::memory_kernel_auto(0.05, 1e-7, 200, bath);
  for (auto _ : state) {
    auto tensor =
        ptqed::pt::build_process_tensor(kernel, static_cast<int>(state.range(0)), {1e-7, 512});
    benchmark::DoNotOptimize(tensor.cores.data());
  }
}
BENCHMARK(BM_TensorBuild)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_Populations(benchmark::State& state) {
  const auto bath = bench_bath();
  const auto kernel = ptqed::bath::memory_kernel_auto(0.05, 1e-7, 200, bath);
  const auto tensor = ptqed::pt::build_process_tensor(kernel, 200, {1e-7, 512});
  const auto props = ptqed::sys::make_propagators(bench_system(), tensor.dt);
  for (auto _ : state) {
    auto series = ptqed::pt::propagate_populations(tensor, props, ptqed::sys::initial_state(), 200);
    benchmark::DoNotOptimize(series.cavity_population.data());
  }
}
BENCHMARK(BM_Populations)->Unit(benchmark::kMillisecond);

void BM_CorrelationGrid(benchmark::State& state) {
  const auto bath = bench_bath();
  const auto kernel = ptqed::bath::memory_kernel_auto(0.05, 1e-7, 200, bath);
  const auto tensor = ptqed::pt::build_process_tensor(kernel, 150, {1e-7, 512});
  const auto props = ptqed::sys::make_propagators(bench_system(), tensor.dt);
  for (auto _ : state) {
    auto grid =
        ptqed::pt::two_time_correlation_grid(tensor, props, ptqed::sys::initial_state(), 150);
    benchmark::DoNotOptimize(grid.g.data());
  }
}
BENCHMARK(BM_CorrelationGrid)->Unit(benchmark::kMillisecond);

void BM_VarpolSolve(benchmark::State& state) {
  const auto bath = bench_bath();
  ptqed::vp::VarpolParams params;
  params.g = 5.0;
  params.pin_resonance = true;
  for (auto _ : state) {
    auto sol = ptqed::vp::solve(bath, params);
    benchmark::DoNotOptimize(sol.b_factor);
  }
}
BENCHMARK(BM_VarpolSolve)->Unit(benchmark::kMillisecond);

void BM_EmissionSpectrum(benchmark::State& state) {
  const auto bath = bench_bath();
  const auto kernel = ptqed::bath::memory_kernel_auto(0.05, 1e-7, 200, bath);
  const auto tensor = ptqed::pt::build_process_tensor(kernel, 150, {1e-7, 512});
  // Overdamped cavity so the emission fully decays inside the short
  // benchmark window (the spectrum enforces that precondition).
  ptqed::sys::SystemParams fast = bench_system();
  fast.g = 1.5;
  fast.kappa = 4.0;
  const auto props = ptqed::sys::make_propagators(fast, tensor.dt);
  const auto grid =
      ptqed::pt::two_time_correlation_grid(tensor, props, ptqed::sys::initial_state(), 150);
  for (auto _ : state) {
    auto spectrum = ptqed::obs::emission_spectrum(grid, fast.kappa);
    benchmark::DoNotOptimize(spectrum.values.data());
  }
}
BENCHMARK(BM_EmissionSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
