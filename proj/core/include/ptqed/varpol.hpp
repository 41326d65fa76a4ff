// varpol.hpp -- variational partial-displacement transformation of the
// emitter-phonon coupling.  A frequency-resolved displacement profile F(nu)
// is optimised self-consistently; its byproducts (dressing factor, level
// shift, dressed coupling) feed the analytic scattering-rate estimates.
#pragma once

#include <vector>

#include "ptqed/bath.hpp"
#include "ptqed/quad.hpp"

namespace ptqed::vp {

struct VarpolParams {
  double g = 1.0;               // bare emitter-cavity coupling (1/ps)
  double delta = 0.0;           // bare cavity detuning (1/ps)
  bool pin_resonance = false;   // re-pick delta = -shift so the dressed detuning vanishes
  double nu_max = 0.0;          // integration limit; 0 -> 8 * xi
  int n_quad = 400;
  double mixing = 0.5;          // damping of the fixed-point update
  double tolerance = 1e-10;     // sup-norm change of the profile
  int max_iterations = 10000;

  void validate() const;
};

struct VarpolSolution {
  double b_factor = 1.0;    // thermal dressing factor B
  double shift = 0.0;       // polaron level shift R
  double g_eff = 0.0;       // dressed coupling g * B
  double delta_eff = 0.0;   // dressed detuning delta + R
  double eta_eff = 0.0;     // dressed splitting sqrt(4 g_eff^2 + delta_eff^2)
  double free_energy = 0.0; // variational free-energy bound
  double delta_used = 0.0;  // bare detuning actually applied
  double beta = 0.0;        // inverse temperature in ps (inf at T = 0)
  int iterations = 0;
  double residual = 0.0;    // last sup-norm profile change

  quad::Rule grid;          // frequency nodes/weights used by the solver
  std::vector<double> profile;  // displacement F at the grid nodes

  // Closed-form displacement profile implied by the converged scalars.
  double displacement(double nu) const;
};

// Dressing factor exp[-1/2 int J F^2 coth(beta nu/2) / nu^2 dnu] for an
// arbitrary profile sampled on a quadrature rule.
double b_factor_for_profile(const quad::Rule& grid, const std::vector<double>& profile,
                            const bath::BathSpec& bath);

// Level shift int (J/nu) F (F - 2) dnu for an arbitrary sampled profile.
double level_shift_for_profile(const quad::Rule& grid, const std::vector<double>& profile,
                               const bath::BathSpec& bath);

// Free-energy bound for converged scalars (shift, splitting) at temperature T.
double free_energy_bound(double shift, double splitting, double beta);

// Solve the self-consistency problem.  Both the undisplaced and the fully
// displaced seeds are iterated; the candidate with the lower free energy wins.
VarpolSolution solve(const bath::BathSpec& bath, const VarpolParams& params);

// Bare detuning that cancels the polaron level shift at the joint fixed point.
double resonance_condition(const bath::BathSpec& bath, double g);

}  // namespace ptqed::vp
