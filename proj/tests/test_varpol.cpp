#include <cmath>
#include <vector>

#include <doctest.h>

#include "ptqed/bath.hpp"
#include "ptqed/varpol.hpp"

using namespace ptqed;

namespace {

vp::VarpolParams solver_params(double g, bool pin) {
  vp::VarpolParams p;
  p.g = g;
  p.pin_resonance = pin;
  return p;
}

}  // namespace

TEST_CASE("weak coupling at zero temperature recovers the fully displaced closed forms") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(0.0);
  const auto sol = vp::solve(spec, solver_params(1e-4, true));

  const double b_full = std::exp(-spec.alpha * spec.xi * spec.xi / 4.0);
  CHECK(sol.b_factor == doctest::Approx(b_full).epsilon(1e-3));
  // Full displacement outside the infrared sliver nu <~ g_eff; exactly
  // nu/(nu + g_eff) at every node.
  for (std::size_t i = 0; i < sol.profile.size(); ++i) {
    const double nu = sol.grid.x[i];
    CHECK(std::abs(sol.profile[i] - nu / (nu + sol.g_eff)) < 1e-6);
    if (nu > 0.5) CHECK(sol.profile[i] == doctest::Approx(1.0).epsilon(1e-3));
  }

  const double shift_full = -spec.alpha * std::sqrt(M_PI) / 4.0 * std::pow(spec.xi, 3);
  CHECK(sol.shift == doctest::Approx(shift_full).epsilon(1e-3));
}

TEST_CASE("arbitrary-profile functionals reproduce closed forms for the constant profile") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(0.0);
  const auto rule = quad::legendre(400, 0.0, 8.0 * spec.xi);
  const std::vector<double> ones(rule.x.size(), 1.0);

  const double b_full = std::exp(-spec.alpha * spec.xi * spec.xi / 4.0);
  CHECK(vp::b_factor_for_profile(rule, ones, spec) == doctest::Approx(b_full).epsilon(1e-6));

  const double shift_full = -spec.alpha * std::sqrt(M_PI) / 4.0 * std::pow(spec.xi, 3);
  CHECK(vp::level_shift_for_profile(rule, ones, spec) ==
        doctest::Approx(shift_full).epsilon(1e-6));

  const std::vector<double> zeros(rule.x.size(), 0.0);
  CHECK(vp::b_factor_for_profile(rule, zeros, spec) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vp::level_shift_for_profile(rule, zeros, spec) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero-temperature fixed point has the lorentzian displacement profile") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(0.0);
  const auto sol = vp::solve(spec, solver_params(5.0, true));
  REQUIRE(sol.profile.size() == sol.grid.x.size());
  // With the dressed detuning pinned to zero and coth -> 1 the update closes
  // to F(nu) = nu / (nu + g_eff).
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.profile.size(); ++i) {
    const double nu = sol.grid.x[i];
    worst = std::max(worst, std::abs(sol.profile[i] - nu / (nu + sol.g_eff)));
  }
  CHECK(worst < 1e-6);
  // Same closed form through the scalar-based helper.
  for (std::size_t i = 0; i < sol.profile.size(); i += 37)
    CHECK(sol.displacement(sol.grid.x[i]) == doctest::Approx(sol.profile[i]).epsilon(1e-8));
}

TEST_CASE("dressing factor rises with coupling and approaches one when the emitter decouples") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(4.0);
  double previous = 0.0;
  for (double g : {0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0}) {
    const auto sol = vp::solve(spec, solver_params(g, true));
    CHECK(sol.b_factor > previous);
    CHECK(sol.b_factor < 1.0);
    previous = sol.b_factor;
    if (g == 10.0) CHECK(sol.b_factor > 0.99);
  }
}

TEST_CASE("converged solution beats every constant trial profile in free energy") {
  for (double temperature : {0.0, 4.0}) {
    CAPTURE(temperature);
    const auto spec = bath::BathSpec::gaas_quantum_dot(temperature);
    vp::VarpolParams params = solver_params(2.0, false);
    const auto sol = vp::solve(spec, params);
    for (double c : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const std::vector<double> trial(sol.grid.x.size(), c);
      const double b = vp::b_factor_for_profile(sol.grid, trial, spec);
      const double shift = vp::level_shift_for_profile(sol.grid, trial, spec);
      const double splitting = std::hypot(2.0 * params.g * b, params.delta + shift);
      const double bound = vp::free_energy_bound(shift, splitting, sol.beta);
      CHECK(sol.free_energy <= bound + 1e-9);
    }
  }
}

TEST_CASE("resonance pinning cancels the dressed detuning") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(4.0);
  const auto pinned = vp::solve(spec, solver_params(2.0, true));
  CHECK(std::abs(pinned.delta_eff) < 1e-9);
  CHECK(pinned.delta_used == doctest::Approx(-pinned.shift).epsilon(1e-9));
  CHECK(pinned.eta_eff == doctest::Approx(2.0 * pinned.g_eff).epsilon(1e-9));
  CHECK(vp::resonance_condition(spec, 2.0) == doctest::Approx(pinned.delta_used).epsilon(1e-9));

  vp::VarpolParams unpinned = solver_params(2.0, false);
  unpinned.delta = 0.3;
  const auto free_detuning = vp::solve(spec, unpinned);
  CHECK(free_detuning.delta_used == doctest::Approx(0.3));
  CHECK(free_detuning.delta_eff ==
        doctest::Approx(free_detuning.delta_used + free_detuning.shift).epsilon(1e-12));
}

TEST_CASE("solver reports convergence diagnostics") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(4.0);
  const auto sol = vp::solve(spec, solver_params(1.0, true));
  CHECK(sol.iterations > 0);
  CHECK(sol.residual <= 1e-10);
  CHECK(sol.g_eff == doctest::Approx(1.0 * sol.b_factor).epsilon(1e-12));
  for (double f : sol.profile) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("temperature weakens the dressing factor") {
  const double g = 1.0;
  const auto cold = vp::solve(bath::BathSpec::gaas_quantum_dot(0.0), solver_params(g, true));
  const auto warm = vp::solve(bath::BathSpec::gaas_quantum_dot(30.0), solver_params(g, true));
  const auto hot = vp::solve(bath::BathSpec::gaas_quantum_dot(150.0), solver_params(g, true));
  CHECK(warm.b_factor < cold.b_factor);
  CHECK(hot.b_factor < warm.b_factor);
}

TEST_CASE("solver parameter validation rejects unusable inputs") {
  const auto spec = bath::BathSpec::gaas_quantum_dot(4.0);
  vp::VarpolParams p;
  p.g = -1.0;
  CHECK_THROWS_AS(vp::solve(spec, p), UsageError);
  p = {};
  p.n_quad = 3;
  CHECK_THROWS_AS(vp::solve(spec, p), UsageError);
  p = {};
  p.mixing = 0.0;
  CHECK_THROWS_AS(vp::solve(spec, p), UsageError);
  p = {};
  p.tolerance = -1.0;
  CHECK_THROWS_AS(vp::solve(spec, p), UsageError);
  p = {};
  p.max_iterations = 0;
  CHECK_THROWS_AS(vp::solve(spec, p), UsageError);
}
