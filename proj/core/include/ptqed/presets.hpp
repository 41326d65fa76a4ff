// presets.hpp -- built-in material presets: light-matter coupling and phonon
// cutoff for emitter-cavity platforms, stored in meV.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ptqed::presets {

struct MaterialPreset {
  std::string name;       // stable machine-friendly identifier
  double hbar_g_mev = 0;  // light-matter coupling
  double hbar_xi_mev = 0; // phonon cutoff frequency
  std::string source;     // human-readable system description

  double g_ps_inv() const;
  double xi_ps_inv() const;
  // 2g > xi: resonant polariton-phonon scattering is pushed off the phonon band.
  bool phonon_decoupled() const { return 2.0 * hbar_g_mev > hbar_xi_mev; }
};

// All built-in presets (8 platforms), in a fixed display order.
const std::vector<MaterialPreset>& material_presets();

// Case-insensitive lookup by name; nullptr when absent.
const MaterialPreset* find_preset(std::string_view name);

}  // namespace ptqed::presets
