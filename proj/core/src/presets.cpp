#include "ptqed/presets.hpp"

#include <algorithm>
#include <cctype>

#include "ptqed/constants.hpp"

namespace ptqed::presets {

double MaterialPreset::g_ps_inv() const { return mev_to_ps_inv(hbar_g_mev); }
double MaterialPreset::xi_ps_inv() const { return mev_to_ps_inv(hbar_xi_mev); }

const std::vector<MaterialPreset>& material_presets() {
  static const std::vector<MaterialPreset> table = {
      {"WS2", 93.0, 53.0, "transition metal dichalcogenide WS2"},
      {"WSe2", 70.0, 50.0, "transition metal dichalcogenide WSe2"},
      {"methylene-blue", 305.0, 213.0, "single methylene blue molecule"},
      {"QD-microcavity", 0.018, 3.0, "quantum dot in tunable microcavity"},
      {"QD-photonic-crystal", 0.113, 0.84, "quantum dot in photonic crystal cavity"},
      {"QD-bowtie", 2.0, 2.23, "quantum dot in dielectric bowtie cavity"},
      {"NV-photonic-crystal", 0.005, 65.0, "NV center in photonic crystal cavity"},
      {"NV-nanobeam", 0.010, 65.0, "NV center in nanobeam photonic crystal cavity"},
  };
  return table;
}

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace

const MaterialPreset* find_preset(std::string_view name) {
  const std::string want = lower(name);
  for (const auto& p : material_presets()) {
    if (lower(p.name) == want) return &p;
  }
  return nullptr;
}

}  // namespace ptqed::presets
