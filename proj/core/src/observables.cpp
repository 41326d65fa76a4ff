#include "ptqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ptqed/errors.hpp"
#include "ptqed/fft.hpp"
#include "ptqed/peaks.hpp"

namespace ptqed::obs {

namespace {

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;
// Fraction of the peak below which the emission is considered decayed.
constexpr double kDecayFraction = 1e-4;

void check_grid(const pt::CorrelationGrid& grid, double kappa) {
  if (grid.steps < 1 || grid.g.rows() != grid.steps + 1 ||
      grid.g.cols() != grid.steps + 1) {
    throw UsageError("correlation grid is empty or inconsistently sized");
  }
  if (!(grid.dt > 0.0)) throw UsageError("correlation grid has dt <= 0");
  if (!(kappa >= 0.0)) throw UsageError("cavity decay rate must be >= 0");
}

// Integration weights along the time axis: trapezoid rule with a raised-cosine
// taper over the final fraction of the window.  The taper suppresses the
// spectral ringing caused by truncating a not-fully-decayed correlation tail.
std::vector<double> time_weights(int n_t, double dt, double taper_fraction) {
  std::vector<double> w(static_cast<std::size_t>(n_t), dt);
  w.front() *= 0.5;
  w.back() *= 0.5;
  if (taper_fraction > 0.0 && n_t > 2) {
    const double t_max = dt * (n_t - 1);
    const double t0 = (1.0 - taper_fraction) * t_max;
    const double span = taper_fraction * t_max;
    for (int j = 0; j < n_t; ++j) {
      const double t = dt * j;
      if (t > t0) w[static_cast<std::size_t>(j)] *= 0.5 * (1.0 + std::cos(kPi * (t - t0) / span));
    }
  }
  return w;
}

// Plain trapezoid weights (no taper); used for the time-domain overlap
// integrals where a window taper would bias the result.
std::vector<double> trapezoid_weights(int n_t, double dt) {
  std::vector<double> w(static_cast<std::size_t>(n_t), dt);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double max_tail_ratio(const pt::CorrelationGrid& grid) {
  const int n_t = grid.steps + 1;
  double peak = 0.0;
  for (int j = 0; j < n_t; ++j) peak = std::max(peak, grid.g(j, j).real());
  if (peak <= 0.0) return 0.0;
  return grid.g(n_t - 1, n_t - 1).real() / peak;
}

void require_decayed(const pt::CorrelationGrid& grid, const char* what) {
  const double ratio = max_tail_ratio(grid);
  if (ratio > kDecayFraction) {
    throw UsageError(std::string(what) +
                     ": emission has not decayed within the simulated window "
                     "(final cavity population is " +
                     std::to_string(ratio) +
                     " of its peak; need < 1e-4).  Increase t_max.");
  }
}

}  // namespace

Spectrum emission_spectrum(const pt::CorrelationGrid& grid, double kappa,
                           const SpectrumOptions& opts) {
  check_grid(grid, kappa);
  if (opts.padding < 1) throw UsageError("spectrum padding factor must be >= 1");
  if (opts.taper_fraction < 0.0 || opts.taper_fraction >= 1.0) {
    throw UsageError("taper fraction must lie in [0, 1)");
  }
  const int k = grid.steps;
  const int n_t = k + 1;
  const double dt = grid.dt;
  const auto w = time_weights(n_t, dt, opts.taper_fraction);

  // Collapse the two-time grid onto the delay axis with the window weights
  // attached to both physical times.  d[m] approximates the windowed integral
  // over t of w(t+tau) w(t) <a^dag(t+tau) a(t)>.
  std::vector<cd> d(static_cast<std::size_t>(n_t), cd{0.0, 0.0});
  for (int m = 0; m <= k; ++m) {
    cd acc{0.0, 0.0};
    for (int j = 0; j + m <= k; ++j) {
      acc += w[static_cast<std::size_t>(j + m)] * w[static_cast<std::size_t>(j)] * grid.g(j + m, j);
    }
    d[static_cast<std::size_t>(m)] = acc;
  }

  // Fourier transform with the delay laid out circularly: non-negative delays
  // at the front, negative delays (conjugate branch) wrapped to the back.
  const std::size_t min_len = static_cast<std::size_t>(2 * k + 1) *
                              static_cast<std::size_t>(opts.padding);
  const std::size_t n_fft = fft::next_pow2(std::max(min_len, static_cast<std::size_t>(2 * k + 2)));
  std::vector<cd> buf(n_fft, cd{0.0, 0.0});
  buf[0] = d[0];
  for (int m = 1; m <= k; ++m) {
    buf[static_cast<std::size_t>(m)] = d[static_cast<std::size_t>(m)];
    buf[n_fft - static_cast<std::size_t>(m)] = std::conj(d[static_cast<std::size_t>(m)]);
  }
  fft::transform(buf, /*inverse=*/false);

  Spectrum out;
  out.dt = dt;
  const double d_omega = 2.0 * kPi / (static_cast<double>(n_fft) * dt);
  out.omega.resize(n_fft);
  out.values.resize(n_fft);
  // Reorder so the frequency axis ascends through zero.
  const std::size_t half = n_fft / 2;
  for (std::size_t q = 0; q < n_fft; ++q) {
    const std::size_t src = (q + half) % n_fft;
    const double omega = (static_cast<double>(q) - static_cast<double>(half)) * d_omega;
    out.omega[q] = omega;
    out.values[q] = kappa * buf[src].real();
  }

  // The windowed quadratic form is positive semi-definite, so negative values
  // can only come from rounding; clip them and record the worst excursion.
  double max_val = 0.0;
  for (double v : out.values) max_val = std::max(max_val, v);
  double worst = 0.0;
  for (double& v : out.values) {
    if (v < 0.0) {
      worst = std::min(worst, max_val > 0.0 ? v / max_val : v);
      v = 0.0;
    }
  }
  out.negative_clip = worst;

  // Normalise the frequency integral to 2*pi times the collected photon
  // number, which ties the spectrum to the efficiency observable exactly.
  out.efficiency = quantum_efficiency(grid, kappa);
  double raw_norm = 0.0;
  for (double v : out.values) raw_norm += v;
  raw_norm *= d_omega;
  const double target = 2.0 * kPi * out.efficiency;
  if (raw_norm > 0.0 && target > 0.0) {
    out.raw_norm_ratio = raw_norm / target;
    const double scale = target / raw_norm;
    for (double& v : out.values) v *= scale;
    out.norm = target;
  } else {
    out.raw_norm_ratio = 1.0;
    out.norm = raw_norm;
  }
  return out;
}

Eigen::MatrixXcd spectral_correlation_matrix(const pt::CorrelationGrid& grid,
                                             double kappa,
                                             const std::vector<double>& omega,
                                             const SpectrumOptions& opts,
                                             std::size_t memory_cap_bytes) {
  check_grid(grid, kappa);
  if (omega.empty()) throw UsageError("spectral correlation matrix needs at least one frequency");
  const int n_t = grid.steps + 1;
  const std::size_t n_w = omega.size();
  const std::size_t bytes = sizeof(cd) * (n_w * n_w + 2 * n_w * static_cast<std::size_t>(n_t));
  if (bytes > memory_cap_bytes) {
    throw ResourceError("spectral correlation matrix would need " +
                        std::to_string(bytes / (1024 * 1024)) +
                        " MiB; reduce the frequency grid or raise the cap");
  }
  const auto w = time_weights(n_t, grid.dt, opts.taper_fraction);

  // S(w_p, w_q) = kappa * sum_{i,j} e^{-i w_p t_i} w_i G(i,j) w_j e^{+i w_q t_j}
  // where index i carries the a^dag time.  Two dense products keep this
  // O(n_w n_t^2) instead of O(n_w^2 n_t^2).
  Eigen::MatrixXcd c(n_w, n_t);
  for (std::size_t p = 0; p < n_w; ++p) {
    for (int j = 0; j < n_t; ++j) {
      const double phase = -omega[p] * grid.dt * j;
      c(static_cast<Eigen::Index>(p), j) =
          std::polar(w[static_cast<std::size_t>(j)], phase);
    }
  }
  Eigen::MatrixXcd tmp = c * grid.g;
  Eigen::MatrixXcd s = kappa * (tmp * c.adjoint());
  return s;
}

double indistinguishability(const pt::CorrelationGrid& grid, double kappa) {
  check_grid(grid, kappa);
  require_decayed(grid, "indistinguishability");
  const int n_t = grid.steps + 1;
  const auto w = trapezoid_weights(n_t, grid.dt);
  const double eta = quantum_efficiency(grid, kappa);
  if (eta <= 0.0) throw UsageError("indistinguishability undefined: no photons collected");
  double acc = 0.0;
  for (int i = 0; i < n_t; ++i) {
    // |G| is Hermitian: fold the strict lower triangle onto the upper.
    acc += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)] * std::norm(grid.g(i, i));
    for (int j = 0; j < i; ++j) {
      acc += 2.0 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * std::norm(grid.g(i, j));
    }
  }
  return kappa * kappa * acc / (eta * eta);
}

double quantum_efficiency(const std::vector<double>& t,
                          const std::vector<double>& cavity_population,
                          double kappa) {
  if (t.size() != cavity_population.size() || t.size() < 2) {
    throw UsageError("efficiency needs matching time and population series");
  }
  if (!(kappa >= 0.0)) throw UsageError("cavity decay rate must be >= 0");
  double peak = 0.0;
  for (double n : cavity_population) peak = std::max(peak, n);
  if (peak > 0.0 && cavity_population.back() > kDecayFraction * peak) {
    throw UsageError(
        "efficiency: emission has not decayed within the simulated window "
        "(final cavity population is " +
        std::to_string(cavity_population.back() / peak) +
        " of its peak; need < 1e-4).  Increase t_max.");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    acc += 0.5 * (t[j + 1] - t[j]) * (cavity_population[j] + cavity_population[j + 1]);
  }
  return kappa * acc;
}

double quantum_efficiency(const pt::PopulationSeries& series, double kappa) {
  return quantum_efficiency(series.t, series.cavity_population, kappa);
}

double quantum_efficiency(const pt::CorrelationGrid& grid, double kappa) {
  check_grid(grid, kappa);
  const int n_t = grid.steps + 1;
  std::vector<double> t(static_cast<std::size_t>(n_t));
  std::vector<double> n(static_cast<std::size_t>(n_t));
  for (int j = 0; j < n_t; ++j) {
    t[static_cast<std::size_t>(j)] = grid.dt * j;
    n[static_cast<std::size_t>(j)] = std::max(0.0, grid.g(j, j).real());
  }
  return quantum_efficiency(t, n, kappa);
}

std::optional<double> polariton_asymmetry(const Spectrum& spectrum, double g_eff,
                                          double min_prominence_fraction) {
  if (spectrum.values.empty() || !(g_eff > 0.0)) return std::nullopt;
  const auto peaks = peaks::find_peaks(spectrum.omega, spectrum.values,
                                       min_prominence_fraction);
  if (peaks.size() < 2) return std::nullopt;
  // Identify the polariton doublet as the prominent peaks nearest the
  // expected splitting on each side of zero.
  const peaks::Peak* lower = nullptr;
  const peaks::Peak* upper = nullptr;
  double best_lo = std::numeric_limits<double>::infinity();
  double best_hi = std::numeric_limits<double>::infinity();
  for (const auto& p : peaks) {
    const double d_lo = std::abs(p.position + g_eff);
    const double d_hi = std::abs(p.position - g_eff);
    if (p.position < 0.0 && d_lo < best_lo) {
      best_lo = d_lo;
      lower = &p;
    }
    if (p.position > 0.0 && d_hi < best_hi) {
      best_hi = d_hi;
      upper = &p;
    }
  }
  // Reject identifications that are nowhere near the doublet.
  if (lower == nullptr || upper == nullptr) return std::nullopt;
  if (best_lo > g_eff || best_hi > g_eff) return std::nullopt;
  const double s_minus = lower->height;
  const double s_plus = upper->height;
  const double denom = s_minus + s_plus;
  if (denom <= 0.0) return std::nullopt;
  return (s_minus - s_plus) / denom;
}

namespace {

// Asymmetric least-squares weight applied to samples lying above the fitted
// line.  The sideband is a nonnegative additive component on top of the line,
// so data exceeding the model is cheap while the model exceeding the data is
// heavily penalized; this stops the fitted width from swallowing the sideband
// shoulders the way a symmetric fit does.
constexpr double kAboveLineWeight = 0.05;

// Line model at distance x from the center: a Lorentzian of the given FWHM,
// optionally multiplied by the cavity response |chi_c|^2 of the stated
// half-width.  Emission collected through a cavity carries that filter
// exactly; without it, the model's 1/x^2 tails overstate the line far from
// the center.  The filter is centred on the line, which is exact up to the
// (negligible whenever the filter matters) cavity-line offset.
double line_shape(double x, double fwhm, double filter_halfwidth) {
  const double hw2 = 0.25 * fwhm * fwhm;
  double v = hw2 / (x * x + hw2);
  if (filter_halfwidth > 0.0) {
    const double f2 = filter_halfwidth * filter_halfwidth;
    v *= f2 / (x * x + f2);
  }
  return v;
}

struct AsymFit {
  double amplitude = 0.0;
  double loss = 0.0;
};

// Best amplitude for a fixed center and width under the asymmetric quadratic
// loss, by iteratively reweighted least squares (the loss is convex piecewise
// quadratic in the amplitude, so the fixed point is the minimum).
AsymFit fit_amplitude(const std::vector<double>& omega, const std::vector<double>& values,
                      double center, double fwhm, double filter_halfwidth) {
  const std::size_t n = values.size();
  std::vector<double> shape(n);
  for (std::size_t q = 0; q < n; ++q) shape[q] = line_shape(omega[q] - center, fwhm, filter_halfwidth);
  double amp = *std::max_element(values.begin(), values.end());
  for (int it = 0; it < 80; ++it) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double phi = values[q] - amp * shape[q] > 0.0 ? kAboveLineWeight : 1.0;
      num += phi * shape[q] * values[q];
      den += phi * shape[q] * shape[q];
    }
    const double next = num / den;
    const bool converged = std::abs(next - amp) <= 1e-14 * std::max(std::abs(amp), 1e-300);
    amp = next;
    if (converged) break;
  }
  AsymFit fit;
  fit.amplitude = amp;
  for (std::size_t q = 0; q < n; ++q) {
    const double r = values[q] - amp * shape[q];
    fit.loss += (r > 0.0 ? kAboveLineWeight : 1.0) * r * r;
  }
  return fit;
}

// Golden-section minimizer over [a, b]; f need not be smooth.
template <typename F>
double golden_min(double a, double b, double tol, F&& f) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 80 && (b - a) > tol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

SidebandAnalysis sideband_analysis(const Spectrum& spectrum, double line_halfwidth,
                                   double filter_halfwidth) {
  if (spectrum.values.size() < 16) throw UsageError("spectrum too short for sideband analysis");
  if (!(line_halfwidth > 0.0)) throw UsageError("line halfwidth must be positive");
  if (filter_halfwidth < 0.0) throw UsageError("filter halfwidth must be >= 0");
  const auto peaks = peaks::find_peaks(spectrum.omega, spectrum.values, 0.05);
  if (peaks.empty()) throw UsageError("no line found in spectrum");
  const auto tallest = std::max_element(
      peaks.begin(), peaks.end(),
      [](const peaks::Peak& a, const peaks::Peak& b) { return a.height < b.height; });
  for (const auto& p : peaks) {
    if (&p == &*tallest) continue;
    if (std::abs(p.position - tallest->position) < line_halfwidth) {
      throw UsageError(
          "sideband analysis is ambiguous: another prominent peak lies inside "
          "the line window; pass a smaller line halfwidth");
    }
  }
  SidebandAnalysis out;
  out.window_halfwidth = line_halfwidth;

  const auto n = spectrum.values.size();
  const double d_omega = (spectrum.omega.back() - spectrum.omega.front()) /
                         static_cast<double>(n - 1);
  std::size_t in_window = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (std::abs(spectrum.omega[q] - tallest->position) <= line_halfwidth) ++in_window;
  }
  if (in_window < 8) {
    throw UsageError("line window covers fewer than 8 spectrum samples; "
                     "increase the zero padding or the window");
  }

  // Initial guesses: center from the refined peak position, width from the
  // measured half-maximum crossings.
  double center = tallest->position;
  double width = peaks::fwhm(spectrum.omega, spectrum.values, *tallest);
  if (!(width > 0.0)) width = line_halfwidth / 3.0;
  width = std::min(width, 1.5 * line_halfwidth);

  // Alternate a width search and a center refinement; the amplitude is solved
  // exactly inside each objective evaluation.  The fit runs over the whole
  // spectrum, so the line's own tails need no extrapolation.
  auto loss_at = [&](double c, double w) {
    return fit_amplitude(spectrum.omega, spectrum.values, c, w, filter_halfwidth).loss;
  };
  for (int round = 0; round < 3; ++round) {
    const double logw = golden_min(std::log(0.35 * width), std::log(2.8 * width), 1e-11,
                                   [&](double lw) { return loss_at(center, std::exp(lw)); });
    width = std::exp(logw);
    center = golden_min(center - 2.0 * d_omega, center + 2.0 * d_omega, 1e-12,
                        [&](double c) { return loss_at(c, width); });
  }
  const AsymFit fit =
      fit_amplitude(spectrum.omega, spectrum.values, center, width, filter_halfwidth);
  out.line_center = center;
  out.line_fwhm = width;
  out.line_amplitude = fit.amplitude;

  // The sideband is whatever the fitted line cannot account for; weight the
  // line as min(data, line) so an imperfect far-tail never counts twice.
  out.residual.assign(n, 0.0);
  double total = 0.0;
  double sideband = 0.0;
  double red = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    total += spectrum.values[q] * d_omega;
    const double line = fit.amplitude * line_shape(spectrum.omega[q] - center, width, filter_halfwidth);
    const double r = std::max(0.0, spectrum.values[q] - line);
    out.residual[q] = r;
    sideband += r * d_omega;
    if (spectrum.omega[q] < center) red += r * d_omega;
  }
  if (total <= 0.0) throw UsageError("spectrum carries no weight");
  out.fraction = std::clamp(sideband / total, 0.0, 1.0);
  out.line_weight = 1.0 - out.fraction;
  out.red_fraction = sideband > 0.0 ? red / sideband : 0.0;
  return out;
}

double default_line_halfwidth(const sys::SystemParams& params) {
  const double purcell = 4.0 * params.g * params.g / (params.kappa + params.gamma_star);
  return 3.0 * (purcell + params.gamma + 2.0 * params.gamma_star);
}

}  // namespace ptqed::obs
