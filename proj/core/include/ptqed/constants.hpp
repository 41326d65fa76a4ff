// constants.hpp -- unit conventions and physical constants.
//
// Internal units: time in ps, rates/frequencies in ps^-1 (angular), hbar = kB = 1.
// Temperatures enter only at the boundary and are converted with KB_OVER_HBAR.
#pragma once

namespace ptqed {

// kB/hbar in ps^-1 per kelvin: thermal frequency of 1 K.
inline constexpr double KB_OVER_HBAR = 0.1309;  // ps^-1 / K

// 1 meV expressed as an angular frequency in ps^-1.
inline constexpr double MEV_TO_PS_INV = 1.5193;  // ps^-1 / meV

inline constexpr double mev_to_ps_inv(double mev) { return mev * MEV_TO_PS_INV; }
inline constexpr double ps_inv_to_mev(double w) { return w / MEV_TO_PS_INV; }

// SI constants, used only by the mode-volume estimate of the light-matter coupling.
namespace si {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double eps0 = 8.8541878128e-12;     // F / m
inline constexpr double c = 299792458.0;             // m / s
inline constexpr double electron_volt = 1.602176634e-19;  // J
}  // namespace si

}  // namespace ptqed
