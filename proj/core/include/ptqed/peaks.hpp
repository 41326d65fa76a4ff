// peaks.hpp -- local-maximum detection with prominence filtering, parabolic
// position refinement, and full-width-half-maximum estimation for sampled
// spectra.
#pragma once

#include <vector>

namespace ptqed::peaks {

struct Peak {
  int index = 0;          // sample index of the discrete maximum
  double position = 0.0;  // parabola-refined abscissa
  double height = 0.0;    // parabola-refined ordinate
  double prominence = 0.0;
};

// All strict local maxima whose prominence exceeds
// min_prominence_fraction * max(y).  x must be ascending and uniform enough
// for three-point parabolic refinement to make sense.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             double min_prominence_fraction);

// Full width at half maximum around one detected peak via linear
// interpolation of the half-height crossings.  Returns 0 if a crossing is
// not bracketed inside the data range.
double fwhm(const std::vector<double>& x, const std::vector<double>& y, const Peak& peak);

}  // namespace ptqed::peaks
