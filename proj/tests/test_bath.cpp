#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "ptqed/bath.hpp"
#include "ptqed/constants.hpp"
#include "ptqed/quad.hpp"

using namespace ptqed;
using oracle::cd;

namespace {
constexpr double kPi = std::numbers::pi;

bath::BathSpec default_bath(double temperature) {
  return bath::BathSpec::gaas_quantum_dot(temperature);
}
}  // namespace

TEST_CASE("gauss-legendre rules integrate polynomials and oscillations exactly") {
  // 8-point rule is exact through degree 15.
  const double p9 = quad::integrate([](double x) { return std::pow(x, 9); }, 8, 0.0, 2.0);
  CHECK(p9 == doctest::Approx(std::pow(2.0, 10) / 10.0).epsilon(1e-13));

  const double full_period = quad::integrate([](double x) { return std::sin(x); }, 64, 0.0, 2.0 * kPi);
  CHECK(std::abs(full_period) < 1e-13);

  const auto& unit = quad::legendre_unit(32);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < unit.w.size(); ++i) {
    weight_sum += unit.w[i];
    CHECK(unit.x[i] == doctest::Approx(-unit.x[unit.x.size() - 1 - i]).epsilon(1e-13));
  }
  CHECK(weight_sum == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("spectral density has the superohmic closed form") {
  const auto spec = default_bath(4.0);
  CHECK(bath::spectral_density(0.0, spec) == 0.0);
  // J(xi) = alpha xi^3 / e.
  const double at_cutoff = spec.alpha * std::pow(spec.xi, 3) * std::exp(-1.0);
  CHECK(bath::spectral_density(spec.xi, spec) == doctest::Approx(at_cutoff).epsilon(1e-14));
  // Maximum at nu = xi sqrt(3/2).
  const double nu_star = spec.xi * std::sqrt(1.5);
  const double h = 1e-5;
  CHECK(bath::spectral_density(nu_star, spec) > bath::spectral_density(nu_star - h, spec));
  CHECK(bath::spectral_density(nu_star, spec) > bath::spectral_density(nu_star + h, spec));
  for (double nu = 0.0; nu < 12.0; nu += 0.3) CHECK(bath::spectral_density(nu, spec) >= 0.0);
  CHECK_THROWS_AS(bath::spectral_density(-0.1, spec), std::domain_error);
}

TEST_CASE("bose occupation satisfies the detailed-balance identity") {
  CHECK(bath::bose_occupation(1.0, 0.0) == 0.0);
  // n(nu) = e^{-nu/kT} (n(nu) + 1).
  for (double t : {1.0, 4.0, 77.0}) {
    for (double nu : {0.2, 1.0, 3.0}) {
      const double n = bath::bose_occupation(nu, t);
      const double boltz = std::exp(-nu / (KB_OVER_HBAR * t));
      CHECK(n == doctest::Approx(boltz * (n + 1.0)).epsilon(1e-12));
    }
  }
  // At nu equal to the thermal frequency, n = 1/(e - 1).
  const double t = 10.0;
  CHECK(bath::bose_occupation(KB_OVER_HBAR * t, t) ==
        doctest::Approx(1.0 / (std::numbers::e - 1.0)).epsilon(1e-12));
  CHECK(bath::bose_occupation(3.0, 4.0) < bath::bose_occupation(1.0, 4.0));
  CHECK_THROWS_AS(bath::bose_occupation(0.0, 4.0), std::domain_error);
}

TEST_CASE("thermal coth interpolates between quantum and classical limits") {
  auto spec = default_bath(0.0);
  CHECK(bath::thermal_coth(1.7, spec) == 1.0);
  spec.temperature = 300.0;
  // High-temperature limit: coth(beta nu / 2) -> 2 / (beta nu).
  const double nu = 0.01;
  CHECK(bath::thermal_coth(nu, spec) ==
        doctest::Approx(2.0 / (spec.beta() * nu)).epsilon(1e-4));
  // Identity coth = 1 + 2 n.
  spec.temperature = 4.0;
  for (double x : {0.5, 1.5, 4.0}) {
    CHECK(bath::thermal_coth(x, spec) ==
          doctest::Approx(1.0 + 2.0 * bath::bose_occupation(x, 4.0)).epsilon(1e-12));
  }
}

TEST_CASE("correlation function matches closed forms and independent quadrature") {
  SUBCASE("zero-temperature equal-time value is alpha xi^4 / (2 pi)") {
    const auto spec = default_bath(0.0);
    const double expected = spec.alpha * std::pow(spec.xi, 4) / (2.0 * kPi);
    CHECK(bath::bath_correlation(0.0, spec).real() == doctest::Approx(expected).epsilon(1e-10));
    CHECK(std::abs(bath::bath_correlation(0.0, spec).imag()) < 1e-12);
  }
  SUBCASE("conjugate symmetry under time reversal") {
    const auto spec = default_bath(50.0);
    for (double tau : {0.13, 0.7, 2.1}) {
      const cd plus = bath::bath_correlation(tau, spec);
      const cd minus = bath::bath_correlation(-tau, spec);
      CHECK(std::abs(plus - std::conj(minus)) < 1e-12);
    }
  }
  SUBCASE("agrees with a locally coded spectral integral") {
    for (double t : {0.0, 4.0, 150.0}) {
      const auto spec = default_bath(t);
      for (double tau : {0.0, 0.21, 1.4}) {
        const cd lib = bath::bath_correlation(tau, spec);
        const cd ref = oracle::correlation_time_domain(tau, spec);
        CHECK(std::abs(lib - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("memory kernel equals the nested time-domain double integral") {
  for (double t : {0.0, 4.0, 150.0}) {
    const auto spec = default_bath(t);
    for (double dt : {0.1, 0.37}) {
      const auto kernel = bath::memory_kernel(dt, 3, spec);
      REQUIRE(kernel.max_lag() == 3);
      const double scale = std::abs(kernel.eta[0]);
      for (int lag = 0; lag <= 3; ++lag) {
        const cd ref = oracle::kernel_element_time_domain(dt, lag, spec);
        CHECK(std::abs(kernel.eta[static_cast<std::size_t>(lag)] - ref) <
              1e-10 + 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("automatic kernel truncation keeps every significant lag") {
  const auto spec = default_bath(4.0);
  const double dt = 0.05;
  const double tol = 1e-6;
  const auto full = bath::memory_kernel(dt, 200, spec);
  const auto cut = bath::memory_kernel_auto(dt, tol, 200, spec);
  CHECK(cut.max_lag() <= 200);
  CHECK(cut.max_lag() >= 1);
  const double ref = std::abs(full.eta[0]);
  // The retained part is bitwise identical to the full kernel.
  for (int k = 0; k <= cut.max_lag(); ++k)
    CHECK(cut.eta[static_cast<std::size_t>(k)] == full.eta[static_cast<std::size_t>(k)]);
  // The first three dropped lags are all below tolerance.
  for (int k = cut.max_lag() + 1; k <= std::min(cut.max_lag() + 3, full.max_lag()); ++k)
    CHECK(std::abs(full.eta[static_cast<std::size_t>(k)]) < tol * ref);
}

TEST_CASE("decoupled bath produces an empty memory") {
  auto spec = default_bath(4.0);
  spec.alpha = 0.0;
  const auto kernel = bath::memory_kernel_auto(0.2, 1e-7, 50, spec);
  CHECK(kernel.max_lag() == 0);
  CHECK(std::abs(kernel.eta[0]) == 0.0);
}

TEST_CASE("thermal dephasing rate reproduces published magnitudes") {
  auto spec = bath::BathSpec::gaas_quantum_dot(4.0);
  spec.xi = 2.2;
  CHECK(bath::pure_dephasing_rate(spec) == doctest::Approx(6.7e-6).epsilon(0.10));
  spec.temperature = 150.0;
  CHECK(bath::pure_dephasing_rate(spec) == doctest::Approx(0.08).epsilon(0.10));
}

TEST_CASE("dephasing rate vanishes at zero temperature and scales with parameters") {
  const auto cold = default_bath(0.0);
  CHECK(bath::pure_dephasing_rate(cold) == 0.0);
  // Monotone in temperature.
  double prev = 0.0;
  for (double t : {2.0, 10.0, 50.0, 150.0}) {
    const double rate = bath::pure_dephasing_rate(default_bath(t));
    CHECK(rate > prev);
    prev = rate;
  }
  // Quadratic in the coupling strength, linear in the curvature parameter.
  auto spec = default_bath(20.0);
  const double base = bath::pure_dephasing_rate(spec);
  auto doubled = spec;
  doubled.alpha *= 2.0;
  CHECK(bath::pure_dephasing_rate(doubled) == doctest::Approx(4.0 * base).epsilon(1e-10));
  auto curved = spec;
  curved.mu *= 3.0;
  CHECK(bath::pure_dephasing_rate(curved) == doctest::Approx(3.0 * base).epsilon(1e-10));
}

TEST_CASE("bath parameter validation rejects unphysical values") {
  auto spec = default_bath(4.0);
  CHECK_NOTHROW(spec.validate());
  spec.alpha = 0.0;  // a decoupled bath is allowed
  CHECK_NOTHROW(spec.validate());
  spec.alpha = -0.01;
  CHECK_THROWS_AS(spec.validate(), std::domain_error);

  spec = default_bath(-1.0);
  CHECK_THROWS_AS(spec.validate(), std::domain_error);

  spec = default_bath(4.0);
  spec.xi = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::domain_error);

  spec = default_bath(4.0);
  spec.nu_max = 3.0;  // below 5 xi
  CHECK_THROWS_AS(spec.validate(), std::domain_error);

  spec = default_bath(4.0);
  spec.n_quad = 8;
  CHECK_THROWS_AS(spec.validate(), std::domain_error);
}

TEST_CASE("under-resolved quadrature raises a numerical error instead of lying") {
  auto spec = default_bath(4.0);
  spec.n_quad = 16;
  spec.nu_max = 50.0 * spec.xi;  // nodes mostly miss the spectral support
  CHECK_THROWS_AS(bath::bath_correlation(0.3, spec), NumericalError);
}

TEST_CASE("unit conversions are inverse to each other") {
  CHECK(mev_to_ps_inv(ps_inv_to_mev(3.7)) == doctest::Approx(3.7).epsilon(1e-15));
  CHECK(mev_to_ps_inv(1.0) == doctest::Approx(1.5193).epsilon(1e-12));
}
