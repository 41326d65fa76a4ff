#include "ptqed/bath.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ptqed/constants.hpp"
#include "ptqed/quad.hpp"

namespace ptqed::bath {

namespace {
constexpr double kCheckTol = 1e-9;  // relative tolerance for the embedded quadrature check

// coth(x) for x > 0 with large-argument saturation.
double coth(double x) {
  if (x > 350.0) return 1.0;
  return 1.0 / std::tanh(x);
}
}  // namespace

void BathSpec::validate() const {
  if (!(alpha >= 0.0)) throw std::domain_error("bath: alpha must be >= 0");
  if (!(xi > 0.0)) throw std::domain_error("bath: xi must be positive");
  if (!(temperature >= 0.0)) throw std::domain_error("bath: temperature must be >= 0");
  if (!(mu >= 0.0)) throw std::domain_error("bath: mu must be >= 0");
  if (nu_max != 0.0 && nu_max < 5.0 * xi)
    throw std::domain_error("bath: nu_max must be at least 5*xi to cover the cutoff");
  if (n_quad < 16) throw std::domain_error("bath: n_quad must be at least 16");
}

double BathSpec::beta() const {
  if (temperature == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (KB_OVER_HBAR * temperature);
}

BathSpec BathSpec::gaas_quantum_dot(double temperature_K) {
  BathSpec s;
  s.alpha = 0.025;
  s.xi = 2.23;
  s.mu = 0.023;
  s.temperature = temperature_K;
  return s;
}

double spectral_density(double nu, const BathSpec& spec) {
  if (nu < 0.0) throw std::domain_error("spectral_density: nu must be >= 0");
  const double r = nu / spec.xi;
  return spec.alpha * nu * nu * nu * std::exp(-r * r);
}

double bose_occupation(double nu, double temperature_K) {
  if (!(nu > 0.0)) throw std::domain_error("bose_occupation: nu must be positive");
  if (temperature_K < 0.0) throw std::domain_error("bose_occupation: temperature must be >= 0");
  if (temperature_K == 0.0) return 0.0;
  const double x = nu / (KB_OVER_HBAR * temperature_K);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

double thermal_coth(double nu, const BathSpec& spec) {
  if (spec.temperature == 0.0) return 1.0;
  return coth(0.5 * spec.beta() * nu);
}

namespace {

// Evaluate Int_0^nu_max f(nu) dnu with the configured rule and a half-order
// check.  abs_scale widens the acceptance for integrals that are tiny
// relative to a caller-supplied problem scale (e.g. deep kernel lags).
template <typename F>
std::complex<double> checked_integral(F&& f, const BathSpec& spec, const char* what,
                                      double abs_scale = 0.0) {
  const double b = spec.resolved_nu_max();
  const auto& full = quad::legendre(spec.n_quad, 0.0, b);
  const auto& half = quad::legendre(spec.n_quad / 2, 0.0, b);
  std::complex<double> s_full = 0.0, s_half = 0.0;
  for (std::size_t i = 0; i < full.x.size(); ++i) s_full += full.w[i] * f(full.x[i]);
  for (std::size_t i = 0; i < half.x.size(); ++i) s_half += half.w[i] * f(half.x[i]);
  const double scale = std::max({std::abs(s_full), abs_scale, 1e-300});
  const double err = std::abs(s_full - s_half) / scale;
  if (err > kCheckTol && std::abs(s_full) > 1e-30) {
    std::ostringstream msg;
    msg << what << ": quadrature not converged (relative spread " << err << " with n = "
        << spec.n_quad << "); increase n_quad or reduce nu_max";
    throw NumericalError(msg.str(), {std::abs(s_half), std::abs(s_full), err});
  }
  return s_full;
}

}  // namespace

std::complex<double> bath_correlation(double tau, const BathSpec& spec) {
  spec.validate();
  auto f = [&](double nu) -> std::complex<double> {
    const double j = spectral_density(nu, spec);
    return {j * thermal_coth(nu, spec) * std::cos(nu * tau), -j * std::sin(nu * tau)};
  };
  return checked_integral(f, spec, "bath_correlation") / M_PI;
}

MemoryKernel memory_kernel(double dt, int k_max, const BathSpec& spec) {
  spec.validate();
  if (!(dt > 0.0)) throw std::domain_error("memory_kernel: dt must be positive");
  if (k_max < 0) throw std::domain_error("memory_kernel: k_max must be >= 0");

  MemoryKernel kern;
  kern.dt = dt;
  kern.eta.resize(k_max + 1);

  // Equal-time window (triangle):
  //   eta_0 = (1/pi) Int dnu J/nu^2 { coth(beta nu/2)(1 - cos nu dt) - i (nu dt - sin nu dt) }
  auto f0 = [&](double nu) -> std::complex<double> {
    const double j = spectral_density(nu, spec) / (nu * nu);
    const double c = std::cos(nu * dt), s = std::sin(nu * dt);
    return {j * thermal_coth(nu, spec) * (1.0 - c), -j * (nu * dt - s)};
  };
  kern.eta[0] = checked_integral(f0, spec, "memory_kernel[0]") / M_PI;

  // Lagged windows (squares):
  //   eta_k = (2/pi) Int dnu J/nu^2 (1 - cos nu dt) { coth cos(nu k dt) - i sin(nu k dt) }
  for (int k = 1; k <= k_max; ++k) {
    auto fk = [&](double nu) -> std::complex<double> {
      const double j = spectral_density(nu, spec) / (nu * nu);
      const double win = 2.0 * (1.0 - std::cos(nu * dt));
      const double ph = nu * k * dt;
      return {j * win * thermal_coth(nu, spec) * std::cos(ph), -j * win * std::sin(ph)};
    };
    kern.eta[k] = checked_integral(fk, spec, "memory_kernel[k]",
                                   M_PI * std::abs(kern.eta[0])) / M_PI;
  }
  return kern;
}

MemoryKernel memory_kernel_auto(double dt, double tolerance, int k_cap, const BathSpec& spec) {
  if (!(tolerance > 0.0)) throw std::domain_error("memory_kernel_auto: tolerance must be positive");
  if (k_cap < 0) throw std::domain_error("memory_kernel_auto: k_cap must be >= 0");
  MemoryKernel full = memory_kernel(dt, k_cap, spec);
  const double ref = std::abs(full.eta[0]);
  if (ref == 0.0) {  // decoupled bath: no memory
    full.eta.resize(1);
    return full;
  }
  int below = 0;
  for (int k = 1; k <= full.max_lag(); ++k) {
    below = (std::abs(full.eta[k]) < tolerance * ref) ? below + 1 : 0;
    if (below >= 3) {
      full.eta.resize(k - 2 + 1);  // keep up to the first of the three quiet lags
      return full;
    }
  }
  return full;  // memory longer than the cap: keep all computed lags
}

double pure_dephasing_rate(const BathSpec& spec) {
  spec.validate();
  if (spec.temperature == 0.0) return 0.0;
  auto f = [&](double nu) -> std::complex<double> {
    const double r = nu / spec.xi;
    const double n = bose_occupation(nu, spec.temperature);
    return std::pow(nu, 10) * std::exp(-2.0 * r * r) * n * (n + 1.0);
  };
  const double integral = checked_integral(f, spec, "pure_dephasing_rate").real();
  const double xi4 = std::pow(spec.xi, 4);
  return spec.alpha * spec.alpha * spec.mu / xi4 * integral;
}

}  // namespace ptqed::bath
