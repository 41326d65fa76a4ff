// rates.hpp -- analytic consequences of the dressed (partially displaced)
// frame: residual bath correlation functions, polariton-to-polariton
// scattering rates, Purcell-regime formulas, and a cavity-coupling estimate
// from electromagnetic mode parameters.
#pragma once

#include <complex>

#include "ptqed/bath.hpp"
#include "ptqed/system.hpp"
#include "ptqed/varpol.hpp"

namespace ptqed::rates {

using cd = std::complex<double>;

// Residual-coupling correlation functions at one time offset.  xy/yx/xz/zx
// vanish identically and are omitted.
struct CorrelationValues {
  cd xx;
  cd yy;
  cd zz;
  cd yz;
  cd zy;   // = -yz by construction
  cd phi;  // displacement-weighted phonon propagator phase
};

CorrelationValues variational_bath_correlations(double tau, const vp::VarpolSolution& sol,
                                                const bath::BathSpec& bath);

struct RateBreakdown {
  double eps_zz = 0.0;
  double eps_yy = 0.0;
  double eps_zy = 0.0;
  double gamma_a = 0.0;  // eps_zz + eps_yy + eps_zy
};

// Difference of downhill and uphill polariton scattering rates, split by
// residual-coupling channel.  Requires a vanishing dressed detuning.
RateBreakdown epsilon_contributions(const vp::VarpolSolution& sol, const bath::BathSpec& bath,
                                    const sys::SystemParams& params);

struct DifferentialRate {
  double gamma_a = 0.0;
  double zz_closed_form = 0.0;  // dominant closed-form channel alone
};

DifferentialRate differential_polariton_rate(const vp::VarpolSolution& sol,
                                             const bath::BathSpec& bath,
                                             const sys::SystemParams& params);

// Damped oscillatory half-range quadratures of the channel correlations with
// convergence-factor extrapolation; used to validate the closed forms.
double epsilon_zz_quadrature(const vp::VarpolSolution& sol, const bath::BathSpec& bath);
double epsilon_zy_quadrature(const vp::VarpolSolution& sol, const bath::BathSpec& bath,
                             const sys::SystemParams& params);

struct PurcellQuantities {
  double rate = 0.0;         // 4 g^2 / (kappa + gamma_star)
  double efficiency = 0.0;   // rate / (rate + gamma)
  double g_recovered = 0.0;  // sqrt(rate * kappa) / 2, bare-cavity inversion
};

PurcellQuantities purcell_quantities(const sys::SystemParams& params);

// Inverse of the bare-cavity formula: the coupling implied by a measured
// Purcell-enhanced emission rate into a cavity of linewidth kappa.
double coupling_from_purcell(double purcell_rate, double kappa);

struct ModeVolumeParams {
  double dipole = 0.0;       // C m
  double wavelength = 0.0;   // m
  double epsilon_r = 1.0;    // background dielectric constant
  double mode_volume = 0.0;  // m^3

  static ModeVolumeParams from_lambda_cubed(double dipole, double wavelength, double epsilon_r,
                                            double volume_in_lambda3);
  void validate() const;
};

struct CouplingEstimate {
  double g_ps_inv = 0.0;
  double hbar_g_mev = 0.0;
};

CouplingEstimate coupling_from_mode_volume(const ModeVolumeParams& mv);

}  // namespace ptqed::rates
