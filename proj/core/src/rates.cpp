#include "ptqed/rates.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "ptqed/constants.hpp"
#include "ptqed/errors.hpp"

namespace ptqed::rates {
namespace {

constexpr double kPi = std::numbers::pi;

// Damped half-range quadrature settings: exponential convergence factors with
// Richardson extrapolation to zero damping.
constexpr double kSigma0 = 0.1;
constexpr int kSimpsonIntervals = 4000;
constexpr double kTauMaxOverXi = 20.0;

double coth_half(double nu, const bath::BathSpec& bath) { return bath::thermal_coth(nu, bath); }

cd phase_integral(double tau, const vp::VarpolSolution& sol, const bath::BathSpec& bath) {
  cd acc = 0.0;
  for (std::size_t i = 0; i < sol.grid.x.size(); ++i) {
    const double nu = sol.grid.x[i];
    const double f = sol.profile[i];
    const double j = bath::spectral_density(nu, bath);
    acc += sol.grid.w[i] * j * f * f / (nu * nu) *
           cd(coth_half(nu, bath) * std::cos(nu * tau), -std::sin(nu * tau));
  }
  return acc;
}

// Simpson integral of e^{-sigma tau} trig(a tau) f(tau) on precomputed nodes.
double damped_transform(const std::vector<double>& values, double dt_tau, double a, double sigma,
                        bool sine) {
  const std::size_t n = values.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = dt_tau * static_cast<double>(i);
    const double trig = sine ? std::sin(a * tau) : std::cos(a * tau);
    const double f = std::exp(-sigma * tau) * trig * values[i];
    double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * dt_tau / 3.0;
}

// Richardson extrapolation over sigma, sigma/2, sigma/4; throws if the two
// first-order extrapolants disagree beyond tolerance.
double extrapolate_damping(const std::vector<double>& values, double dt_tau, double a, bool sine,
                           const char* what) {
  const double e1 = damped_transform(values, dt_tau, a, kSigma0, sine);
  const double e2 = damped_transform(values, dt_tau, a, kSigma0 / 2.0, sine);
  const double e3 = damped_transform(values, dt_tau, a, kSigma0 / 4.0, sine);
  const double r1 = 2.0 * e2 - e1;
  const double r2 = 2.0 * e3 - e2;
  const double result = (4.0 * r2 - r1) / 3.0;
  if (std::abs(r2 - r1) > std::max(1e-6, 0.1 * std::abs(result)))
    throw NumericalError(std::string("damping extrapolation for ") + what + " did not settle",
                         {e1, e2, e3});
  return result;
}

void require_resonant(const vp::VarpolSolution& sol) {
  if (std::abs(sol.delta_eff) > 1e-6 * std::max(1.0, sol.eta_eff))
    throw UsageError("polariton rates assume a vanishing dressed detuning; "
                     "solve the displacement profile with the resonance pin");
}

struct TauGrid {
  double dt_tau;
  std::vector<double> tau;
};

TauGrid make_tau_grid(const bath::BathSpec& bath) {
  TauGrid g;
  const double tau_max = kTauMaxOverXi / bath.xi;
  g.dt_tau = tau_max / kSimpsonIntervals;
  g.tau.resize(kSimpsonIntervals + 1);
  for (std::size_t i = 0; i < g.tau.size(); ++i) g.tau[i] = g.dt_tau * static_cast<double>(i);
  return g;
}

}  // namespace

CorrelationValues variational_bath_correlations(double tau, const vp::VarpolSolution& sol,
                                                const bath::BathSpec& bath) {
  if (sol.grid.x.size() != sol.profile.size())
    throw UsageError("solution profile does not match its quadrature grid");
  CorrelationValues out;
  out.phi = phase_integral(tau, sol, bath);
  const double b2 = sol.b_factor * sol.b_factor;
  out.xx = b2 * (std::cosh(out.phi) - 1.0);
  out.yy = b2 * std::sinh(out.phi);
  cd zz = 0.0, yz = 0.0;
  for (std::size_t i = 0; i < sol.grid.x.size(); ++i) {
    const double nu = sol.grid.x[i];
    const double f = sol.profile[i];
    const double j = bath::spectral_density(nu, bath);
    const double coth = coth_half(nu, bath);
    const double c = std::cos(nu * tau);
    const double s = std::sin(nu * tau);
    zz += sol.grid.w[i] * j * (1.0 - f * f) * cd(coth * c, -s);
    yz += sol.grid.w[i] * j / nu * f * (1.0 - f) * cd(coth * s, c);
  }
  out.zz = zz;
  out.yz = -sol.b_factor * yz;
  out.zy = -out.yz;
  return out;
}

RateBreakdown epsilon_contributions(const vp::VarpolSolution& sol, const bath::BathSpec& bath,
                                    const sys::SystemParams& params) {
  require_resonant(sol);
  RateBreakdown out;
  const double a = 2.0 * sol.g_eff;
  if (a <= 0.0) return out;
  const double j = bath::spectral_density(a, bath);
  const double f = sol.displacement(a);
  out.eps_zz = 0.5 * kPi * j * (1.0 - f * f);
  // The time-quadrature definition of the cross channel fixes the sign as
  // negative; together with eps_yy > 0 this produces the near-cancellation.
  out.eps_zy = -kPi * j * f * (1.0 - f);

  const TauGrid grid = make_tau_grid(bath);
  std::vector<double> im_yy(grid.tau.size());
  const double b2 = sol.b_factor * sol.b_factor;
  for (std::size_t i = 0; i < grid.tau.size(); ++i) {
    const cd phi = phase_integral(grid.tau[i], sol, bath);
    im_yy[i] = b2 * (std::cosh(phi.real()) * std::sin(phi.imag()));
  }
  const double g = params.g;
  out.eps_yy =
      -4.0 * g * g * extrapolate_damping(im_yy, grid.dt_tau, a, /*sine=*/true, "eps_yy");
  out.gamma_a = out.eps_zz + out.eps_yy + out.eps_zy;
  return out;
}

DifferentialRate differential_polariton_rate(const vp::VarpolSolution& sol,
                                             const bath::BathSpec& bath,
                                             const sys::SystemParams& params) {
  const RateBreakdown b = epsilon_contributions(sol, bath, params);
  return DifferentialRate{b.gamma_a, b.eps_zz};
}

double epsilon_zz_quadrature(const vp::VarpolSolution& sol, const bath::BathSpec& bath) {
  require_resonant(sol);
  const double a = 2.0 * sol.g_eff;
  if (a <= 0.0) return 0.0;
  const TauGrid grid = make_tau_grid(bath);
  std::vector<double> im_zz(grid.tau.size());
  for (std::size_t i = 0; i < grid.tau.size(); ++i)
    im_zz[i] = variational_bath_correlations(grid.tau[i], sol, bath).zz.imag();
  // eps_zz = -int sin(2 g_eff tau) Im C_zz(tau) dtau
  return -extrapolate_damping(im_zz, grid.dt_tau, a, /*sine=*/true, "eps_zz");
}

double epsilon_zy_quadrature(const vp::VarpolSolution& sol, const bath::BathSpec& bath,
                             const sys::SystemParams& params) {
  require_resonant(sol);
  const double a = 2.0 * sol.g_eff;
  if (a <= 0.0) return 0.0;
  const TauGrid grid = make_tau_grid(bath);
  std::vector<double> im_zy(grid.tau.size());
  for (std::size_t i = 0; i < grid.tau.size(); ++i)
    im_zy[i] = variational_bath_correlations(grid.tau[i], sol, bath).zy.imag();
  // eps_zy = -4 g int cos(2 g_eff tau) Im C_zy(tau) dtau
  return -4.0 * params.g * extrapolate_damping(im_zy, grid.dt_tau, a, /*sine=*/false, "eps_zy");
}

PurcellQuantities purcell_quantities(const sys::SystemParams& params) {
  if (params.kappa <= 0.0) throw UsageError("Purcell formulas require a positive cavity decay rate");
  PurcellQuantities out;
  out.rate = 4.0 * params.g * params.g / (params.kappa + params.gamma_star);
  out.efficiency = out.rate / (out.rate + params.gamma);
  out.g_recovered = coupling_from_purcell(out.rate, params.kappa);
  return out;
}

double coupling_from_purcell(double purcell_rate, double kappa) {
  if (purcell_rate < 0.0 || kappa <= 0.0)
    throw UsageError("Purcell inversion requires rate >= 0 and kappa > 0");
  return 0.5 * std::sqrt(purcell_rate * kappa);
}

ModeVolumeParams ModeVolumeParams::from_lambda_cubed(double dipole, double wavelength,
                                                     double epsilon_r, double volume_in_lambda3) {
  ModeVolumeParams mv;
  mv.dipole = dipole;
  mv.wavelength = wavelength;
  mv.epsilon_r = epsilon_r;
  mv.mode_volume = volume_in_lambda3 * wavelength * wavelength * wavelength;
  mv.validate();
  return mv;
}

void ModeVolumeParams::validate() const {
  if (dipole <= 0.0 || wavelength <= 0.0 || epsilon_r <= 0.0 || mode_volume <= 0.0)
    throw UsageError("mode-volume parameters must all be positive");
}

CouplingEstimate coupling_from_mode_volume(const ModeVolumeParams& mv) {
  mv.validate();
  const double omega = 2.0 * kPi * si::c / mv.wavelength;  // rad/s
  const double g_rad_per_s = std::sqrt(mv.dipole * mv.dipole * omega /
                                       (2.0 * si::hbar * si::eps0 * mv.epsilon_r * mv.mode_volume));
  CouplingEstimate out;
  out.g_ps_inv = g_rad_per_s * 1e-12;
  out.hbar_g_mev = ps_inv_to_mev(out.g_ps_inv);
  return out;
}

}  // namespace ptqed::rates
