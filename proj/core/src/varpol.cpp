#include "ptqed/varpol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptqed/errors.hpp"

namespace ptqed::vp {
namespace {

double ln_2cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x));
}

double coth_half(double nu, double beta) {
  if (std::isinf(beta)) return 1.0;
  const double x = 0.5 * beta * nu;
  if (x > 350.0) return 1.0;
  return 1.0 / std::tanh(x);
}

// One evaluation of the stationarity condition for the profile, written so
// that a vanishing dressed detuning needs no special casing.
double profile_update(double nu, double g_eff, double delta_eff, double eta_eff, double beta) {
  if (g_eff == 0.0) return 1.0;
  const double t_eta = std::isinf(beta) ? 1.0 : std::tanh(std::min(0.5 * beta * eta_eff, 350.0));
  const double ratio = (eta_eff > 0.0) ? (delta_eff / eta_eff) * t_eta : 0.0;
  const double numer = 1.0 - ratio;
  const double mix = (2.0 * g_eff * g_eff / (nu * eta_eff)) * t_eta * coth_half(nu, beta);
  return numer / (numer + mix);
}

struct ScalarState {
  double b = 1.0;
  double shift = 0.0;
  double g_eff = 0.0;
  double delta_eff = 0.0;
  double eta_eff = 0.0;
  double delta_used = 0.0;
};

ScalarState scalars_for_profile(const quad::Rule& grid, const std::vector<double>& f,
                                const bath::BathSpec& bath, const VarpolParams& p) {
  ScalarState s;
  s.b = b_factor_for_profile(grid, f, bath);
  s.shift = level_shift_for_profile(grid, f, bath);
  s.delta_used = p.pin_resonance ? -s.shift : p.delta;
  s.delta_eff = s.delta_used + s.shift;
  s.g_eff = p.g * s.b;
  s.eta_eff = std::hypot(2.0 * s.g_eff, s.delta_eff);
  return s;
}

}  // namespace

void VarpolParams::validate() const {
  if (g < 0.0) throw UsageError("coupling must be non-negative");
  if (nu_max < 0.0) throw UsageError("frequency limit must be non-negative");
  if (n_quad < 16) throw UsageError("need at least 16 quadrature nodes");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw UsageError("mixing must lie in (0, 1]");
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be positive");
  if (max_iterations < 1) throw UsageError("need at least one iteration");
}

double VarpolSolution::displacement(double nu) const {
  if (nu <= 0.0) throw UsageError("displacement profile is defined for positive frequencies");
  return profile_update(nu, g_eff, delta_eff, eta_eff, beta);
}

double b_factor_for_profile(const quad::Rule& grid, const std::vector<double>& profile,
                            const bath::BathSpec& bath) {
  if (grid.x.size() != profile.size())
    throw UsageError("profile sample count does not match the quadrature rule");
  const double beta = bath.beta();
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const double nu = grid.x[i];
    const double f = profile[i];
    acc += grid.w[i] * bath::spectral_density(nu, bath) * f * f * coth_half(nu, beta) / (nu * nu);
  }
  return std::exp(-0.5 * acc);
}

double level_shift_for_profile(const quad::Rule& grid, const std::vector<double>& profile,
                               const bath::BathSpec& bath) {
  if (grid.x.size() != profile.size())
    throw UsageError("profile sample count does not match the quadrature rule");
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const double nu = grid.x[i];
    const double f = profile[i];
    acc += grid.w[i] * bath::spectral_density(nu, bath) / nu * f * (f - 2.0);
  }
  return acc;
}

double free_energy_bound(double shift, double splitting, double beta) {
  if (std::isinf(beta)) return 0.5 * (shift - splitting);
  return 0.5 * shift - ln_2cosh(0.5 * beta * splitting) / beta;
}

VarpolSolution solve(const bath::BathSpec& bath, const VarpolParams& params) {
  bath.validate();
  params.validate();
  const double nu_max = (params.nu_max > 0.0) ? params.nu_max : 8.0 * bath.xi;
  const quad::Rule grid = quad::legendre(params.n_quad, 0.0, nu_max);
  const double beta = bath.beta();
  const std::size_t n = grid.x.size();

  auto iterate = [&](double seed) -> VarpolSolution {
    std::vector<double> f(n, seed);
    std::vector<double> f_new(n, 0.0);
    std::vector<double> residual_history;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    for (int it = 1; it <= params.max_iterations; ++it) {
      const ScalarState s = scalars_for_profile(grid, f, bath, params);
      residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        f_new[i] = profile_update(grid.x[i], s.g_eff, s.delta_eff, s.eta_eff, beta);
        residual = std::max(residual, std::abs(f_new[i] - f[i]));
      }
      residual_history.push_back(residual);
      iterations = it;
      if (residual < params.tolerance) {
        f = f_new;
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i)
        f[i] = (1.0 - params.mixing) * f[i] + params.mixing * f_new[i];
    }
    if (!converged) {
      const std::size_t keep = std::min<std::size_t>(residual_history.size(), 16);
      std::vector<double> tail(residual_history.end() - static_cast<std::ptrdiff_t>(keep),
                               residual_history.end());
      throw NumericalError("displacement-profile iteration did not converge within " +
                               std::to_string(params.max_iterations) + " iterations",
                           tail);
    }
    const ScalarState s = scalars_for_profile(grid, f, bath, params);
    VarpolSolution sol;
    sol.b_factor = s.b;
    sol.shift = s.shift;
    sol.g_eff = s.g_eff;
    sol.delta_eff = s.delta_eff;
    sol.eta_eff = s.eta_eff;
    sol.free_energy = free_energy_bound(s.shift, s.eta_eff, beta);
    sol.delta_used = s.delta_used;
    sol.beta = beta;
    sol.iterations = iterations;
    sol.residual = residual;
    sol.grid = grid;
    sol.profile = f;
    return sol;
  };

  VarpolSolution bare = iterate(0.0);
  VarpolSolution displaced = iterate(1.0);
  return (bare.free_energy < displaced.free_energy) ? bare : displaced;
}

double resonance_condition(const bath::BathSpec& bath, double g) {
  VarpolParams params;
  params.g = g;
  params.pin_resonance = true;
  return solve(bath, params).delta_used;
}

}  // namespace ptqed::vp
