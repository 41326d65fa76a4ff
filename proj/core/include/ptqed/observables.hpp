// observables.hpp -- physical outputs derived from two-time correlation
// grids: emission spectra, the two-frequency correlation matrix, photon
// indistinguishability, quantum efficiency, polariton asymmetry, and
// sideband weights.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ptqed/peaks.hpp"
#include "ptqed/ptensor.hpp"
#include "ptqed/system.hpp"

namespace ptqed::obs {

struct SpectrumOptions {
  int padding = 4;              // zero-padding factor before the transform
  double taper_fraction = 0.1;  // raised-cosine taper on the tail of the time window
};

struct Spectrum {
  std::vector<double> omega;   // 1/ps, ascending; zero at the bare emitter line
  std::vector<double> values;  // nonnegative; renormalized to integrate to 2*pi*efficiency
  double norm = 0.0;           // integral over omega after renormalization
  double efficiency = 0.0;     // kappa * integral of the cavity population
  double raw_norm_ratio = 1.0; // pre-renormalization integral / (2 pi efficiency)
  double negative_clip = 0.0;  // largest clipped negative value relative to the maximum
  double dt = 0.0;
};

// Diagonal two-frequency spectrum S(omega, omega) of the emitted field.
Spectrum emission_spectrum(const pt::CorrelationGrid& grid, double kappa,
                           const SpectrumOptions& opts = {});

// Full two-frequency correlation matrix on a caller-chosen frequency grid.
// Hermitian by construction; its diagonal matches emission_spectrum's raw
// (unrenormalized) values on the same frequencies.
Eigen::MatrixXcd spectral_correlation_matrix(const pt::CorrelationGrid& grid, double kappa,
                                             const std::vector<double>& omega,
                                             const SpectrumOptions& opts = {},
                                             std::size_t memory_cap_bytes = std::size_t(1) << 30);

// Interference visibility of consecutively emitted photons, evaluated in the
// time domain (Parseval-equivalent to the two-frequency definition).
double indistinguishability(const pt::CorrelationGrid& grid, double kappa);

// kappa * integral of <a^dag a>(t) by trapezoid; the photon-emission
// probability through the cavity channel.
double quantum_efficiency(const std::vector<double>& t, const std::vector<double>& cavity_population,
                          double kappa);
double quantum_efficiency(const pt::PopulationSeries& series, double kappa);
double quantum_efficiency(const pt::CorrelationGrid& grid, double kappa);

// Signed contrast between the lower (negative-frequency) and upper polariton
// peaks; empty when two peaks near +-g_eff cannot be resolved.
std::optional<double> polariton_asymmetry(const Spectrum& spectrum, double g_eff,
                                          double min_prominence_fraction = 0.05);

struct SidebandAnalysis {
  double fraction = 0.0;        // sideband weight / total weight
  double red_fraction = 0.0;    // sideband weight below the line / sideband weight
  double line_center = 0.0;     // fitted line center
  double line_weight = 0.0;     // 1 - fraction
  double line_fwhm = 0.0;       // fitted Lorentzian full width at half maximum
  double line_amplitude = 0.0;  // fitted line height at the center
  double window_halfwidth = 0.0;
  std::vector<double> residual;  // max(0, data - fitted line), per spectrum sample
};

// Separates a dominant line from the remaining (sideband) spectral weight.  A
// single Lorentzian centered on the tallest peak is fitted over the whole
// spectrum under an asymmetric loss: samples above the model are weighted
// lightly, since the sideband adds nonnegative weight on top of the line,
// while a model exceeding the data is heavily penalized.  The sideband is the
// positive residual, so a pure Lorentzian spectrum yields a fraction of zero
// and the fitted width cannot inflate itself into the sideband shoulders.
//
// When the emission is collected through a cavity whose linewidth is not far
// above the analysis band, pass filter_halfwidth = kappa/2: the line model is
// then multiplied by the cavity response |chi_c|^2, whose faster far-tail
// falloff would otherwise be misread as a (symmetric) sideband.
//
// The window half-width bounds the initial width guess and rejects a second
// prominent peak inside the window as ambiguous.
SidebandAnalysis sideband_analysis(const Spectrum& spectrum, double line_halfwidth,
                                   double filter_halfwidth = 0.0);

// Default line window half-width: three times the broadened-line rate scale.
double default_line_halfwidth(const sys::SystemParams& params);

}  // namespace ptqed::obs
