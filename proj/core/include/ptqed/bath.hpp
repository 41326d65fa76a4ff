// bath.hpp -- acoustic-phonon environment: spectral density, thermal occupation,
// correlation function, discretized memory kernel, and the thermal pure-dephasing rate.
//
// Spectral density: J(nu) = alpha * nu^3 * exp(-(nu/xi)^2), alpha in ps^2, xi in ps^-1.
// Correlation function (hbar = kB = 1, beta in ps):
//   C(tau) = (1/pi) Int_0^inf dnu J(nu) [coth(beta nu / 2) cos(nu tau) - i sin(nu tau)]
#pragma once

#include <complex>
#include <vector>

#include "ptqed/errors.hpp"

namespace ptqed::bath {

struct BathSpec {
  double alpha = 0.025;      // deformation-coupling strength, ps^2
  double xi = 2.23;          // Gaussian cutoff frequency, ps^-1
  double temperature = 4.0;  // K (0 allowed)
  double mu = 0.023;         // curvature parameter of the second phonon band, ps^2
  double nu_max = 0.0;       // quadrature upper limit, ps^-1; 0 -> 8*xi
  int n_quad = 2000;         // Gauss-Legendre nodes on [0, nu_max]

  // Throws std::domain_error on non-physical values (alpha/mu < 0, xi <= 0,
  // T < 0, nu_max < 5*xi when set, n_quad < 16).
  void validate() const;

  double resolved_nu_max() const { return nu_max > 0.0 ? nu_max : 8.0 * xi; }
  // Inverse temperature hbar/(kB T) in ps; +inf at T = 0.
  double beta() const;

  // GaAs quantum-dot defaults at the given temperature.
  static BathSpec gaas_quantum_dot(double temperature_K);
};

// eta_0 .. eta_{k} double integrals of C over timestep windows (triangular for the
// equal-time element, square for lagged ones).
struct MemoryKernel {
  double dt = 0.0;
  std::vector<std::complex<double>> eta;  // eta[m] is the lag-m coefficient
  int max_lag() const { return static_cast<int>(eta.size()) - 1; }
};

// J(nu); throws std::domain_error for nu < 0.
double spectral_density(double nu, const BathSpec& spec);

// Bose-Einstein occupation [exp(nu/(kB T)) - 1]^-1; 0 at T = 0; throws for nu <= 0.
double bose_occupation(double nu, double temperature_K);

// coth(beta*nu/2) with the T = 0 limit handled (returns 1).
double thermal_coth(double nu, const BathSpec& spec);

// C(tau). The quadrature is checked against a half-order rule; disagreement beyond
// ~1e-9 relative raises NumericalError.
std::complex<double> bath_correlation(double tau, const BathSpec& spec);

// Memory kernel for a fixed number of lags (eta_0..eta_k_max).
MemoryKernel memory_kernel(double dt, int k_max, const BathSpec& spec);

// Memory kernel truncated where |eta_k|/|eta_0| stays below `tolerance`
// (three consecutive lags required); lag count capped at k_cap.
MemoryKernel memory_kernel_auto(double dt, double tolerance, int k_cap, const BathSpec& spec);

// Thermal two-phonon pure-dephasing rate
//   gamma*(T) = (alpha^2 mu / xi^4) Int dnu nu^10 exp(-2 (nu/xi)^2) n(nu) (n(nu)+1).
double pure_dephasing_rate(const BathSpec& spec);

}  // namespace ptqed::bath
