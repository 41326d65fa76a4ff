// config.hpp -- sectioned key-value (INI-style) run configuration: parsing,
// defaulting, unit conversion, and exhaustive validation.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ptqed/engine.hpp"

namespace ptqed::config {

enum class Task {
  kSpectrum,
  kIndistinguishability,
  kEfficiency,
  kVarpol,
  kRates,
  kSweep,
  kRegimeMap,
};

enum class SweepVariable { kG, kKappa, kGamma, kGammaStar, kDelta, kTemperature, kAlpha, kXi };

enum class SweepObservable { kVarpol, kRates, kEfficiency, kIndistinguishability, kSideband };

std::string to_string(Task task);
std::string to_string(SweepVariable variable);
std::string to_string(SweepObservable observable);

struct SweepSpec {
  SweepVariable variable = SweepVariable::kG;
  std::vector<double> values;
  bool pin_kappa_to_4g = false;
  SweepObservable observable = SweepObservable::kEfficiency;
};

struct OutputSpec {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  Task task = Task::kSpectrum;
  engine::SimulationSettings settings;  // bath + system + engine knobs
  bool gamma_star_auto = true;  // gamma* recomputed from the bath when T changes
  bool pin_resonance = true;    // delta re-picked to cancel the polaron shift
  int padding = 4;              // spectrum zero-padding factor
  SweepSpec sweep;              // populated when task == kSweep
  OutputSpec output;
  std::string echo;      // resolved parameters with unit conversions, one per line
  std::string raw_text;  // config text as read; hashed into the run manifest
};

// Parse, apply defaults, convert units, and validate.  Every violation is
// collected; any violation raises ValidationError carrying the full list.
RunConfig parse_and_validate(const std::filesystem::path& path);
RunConfig parse_and_validate_text(const std::string& text,
                                  const std::string& origin = "<memory>");

}  // namespace ptqed::config
