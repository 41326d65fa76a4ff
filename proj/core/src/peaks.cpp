#include "ptqed/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "ptqed/errors.hpp"

namespace ptqed::peaks {
namespace {

// Prominence: height above the higher of the two key saddles, where each
// saddle is the minimum between the peak and the nearest strictly higher
// sample (or the data edge) on that side.
double prominence_at(const std::vector<double>& y, int idx) {
  const double h = y[static_cast<std::size_t>(idx)];
  double left_min = h;
  for (int i = idx - 1; i >= 0; --i) {
    const double v = y[static_cast<std::size_t>(i)];
    if (v > h) break;
    left_min = std::min(left_min, v);
  }
  double right_min = h;
  for (int i = idx + 1; i < static_cast<int>(y.size()); ++i) {
    const double v = y[static_cast<std::size_t>(i)];
    if (v > h) break;
    right_min = std::min(right_min, v);
  }
  return h - std::max(left_min, right_min);
}

}  // namespace

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             double min_prominence_fraction) {
  if (x.size() != y.size()) throw UsageError("peak search needs matching abscissa/ordinate sizes");
  if (x.size() < 3) return {};
  const double ymax = *std::max_element(y.begin(), y.end());
  if (!(ymax > 0.0)) return {};
  const double threshold = min_prominence_fraction * ymax;

  std::vector<Peak> out;
  for (int i = 1; i + 1 < static_cast<int>(y.size()); ++i) {
    const double ym = y[static_cast<std::size_t>(i) - 1];
    const double yc = y[static_cast<std::size_t>(i)];
    const double yp = y[static_cast<std::size_t>(i) + 1];
    // Strict rise on the left, non-rise on the right: one hit per plateau.
    if (!(yc > ym && yc >= yp)) continue;
    const double prom = prominence_at(y, i);
    if (prom < threshold) continue;
    Peak p;
    p.index = i;
    const double denom = ym - 2.0 * yc + yp;
    double shift = 0.0;
    if (denom < 0.0) shift = 0.5 * (ym - yp) / denom;
    shift = std::clamp(shift, -0.5, 0.5);
    const double dx_left = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i) - 1];
    const double dx_right = x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)];
    const double dx = 0.5 * (dx_left + dx_right);
    p.position = x[static_cast<std::size_t>(i)] + shift * dx;
    p.height = yc - 0.25 * (ym - yp) * shift;
    p.prominence = prom;
    out.push_back(p);
  }
  return out;
}

double fwhm(const std::vector<double>& x, const std::vector<double>& y, const Peak& peak) {
  const double half = 0.5 * peak.height;
  const int n = static_cast<int>(y.size());
  double left = 0.0, right = 0.0;
  bool have_left = false, have_right = false;
  for (int i = peak.index; i > 0; --i) {
    const double y1 = y[static_cast<std::size_t>(i) - 1];
    const double y2 = y[static_cast<std::size_t>(i)];
    if (y1 <= half && y2 >= half) {
      const double f = (half - y1) / (y2 - y1);
      left = x[static_cast<std::size_t>(i) - 1] +
             f * (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i) - 1]);
      have_left = true;
      break;
    }
  }
  for (int i = peak.index; i + 1 < n; ++i) {
    const double y1 = y[static_cast<std::size_t>(i)];
    const double y2 = y[static_cast<std::size_t>(i) + 1];
    if (y1 >= half && y2 <= half) {
      const double f = (y1 - half) / (y1 - y2);
      right = x[static_cast<std::size_t>(i)] +
              f * (x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)]);
      have_right = true;
      break;
    }
  }
  if (!have_left || !have_right) return 0.0;
  return right - left;
}

}  // namespace ptqed::peaks
