#include "ptqed/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ptqed/constants.hpp"
#include "ptqed/errors.hpp"
#include "ptqed/presets.hpp"

namespace ptqed::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct ParsedFile {
  std::map<std::string, std::string> entries;  // "section.key" -> value
  std::vector<std::string> violations;
};

ParsedFile parse_ini(const std::string& text, const std::string& origin) {
  ParsedFile out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        out.violations.push_back(origin + ":" + std::to_string(lineno) + ": unterminated section header");
        continue;
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        out.violations.push_back(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      out.violations.push_back(origin + ":" + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      out.violations.push_back(origin + ":" + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (section.empty()) {
      out.violations.push_back(origin + ":" + std::to_string(lineno) + ": key '" + key +
                               "' outside any [section]");
      continue;
    }
    const std::string full = section + "." + key;
    if (!out.entries.emplace(full, value).second)
      out.violations.push_back(origin + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
  }
  return out;
}

// Tracks which entries were consumed so leftovers can be reported as unknown.
class Reader {
 public:
  Reader(ParsedFile& file, std::vector<std::string>& violations)
      : file_(file), violations_(violations) {}

  std::optional<std::string> raw(const std::string& key) {
    auto it = file_.entries.find(key);
    if (it == file_.entries.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  bool has(const std::string& key) const { return file_.entries.count(key) != 0; }

  std::optional<double> number(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    const char* begin = v->c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(x)) {
      violations_.push_back(key + ": '" + *v + "' is not a number");
      return std::nullopt;
    }
    return x;
  }

  std::optional<int> integer(const std::string& key) {
    const auto x = number(key);
    if (!x) return std::nullopt;
    const double r = std::round(*x);
    if (std::abs(*x - r) > 1e-9 || std::abs(r) > 2e9) {
      violations_.push_back(key + ": expected an integer");
      return std::nullopt;
    }
    return static_cast<int>(r);
  }

  std::optional<bool> boolean(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    const std::string s = lower(*v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    violations_.push_back(key + ": '" + *v + "' is not a boolean");
    return std::nullopt;
  }

  // Either a comma-separated list of numbers or "start:stop:count".
  std::optional<std::vector<double>> number_list(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    if (v->find(':') != std::string::npos) {
      double a = 0, b = 0;
      int n = 0;
      char extra = '\0';
      if (std::sscanf(v->c_str(), "%lf:%lf:%d %c", &a, &b, &n, &extra) != 3 || n < 2) {
        violations_.push_back(key + ": range syntax is start:stop:count with count >= 2");
        return std::nullopt;
      }
      out.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
      return out;
    }
    std::istringstream in(*v);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      const char* begin = tok.c_str();
      char* end = nullptr;
      const double x = std::strtod(begin, &end);
      if (end == begin || *end != '\0' || !std::isfinite(x)) {
        violations_.push_back(key + ": '" + tok + "' is not a number");
        return std::nullopt;
      }
      out.push_back(x);
    }
    if (out.empty()) {
      violations_.push_back(key + ": empty value list");
      return std::nullopt;
    }
    return out;
  }

  void report_unknown() {
    for (const auto& [key, value] : file_.entries) {
      if (!used_.count(key)) violations_.push_back("unknown key '" + key + "'");
    }
  }

 private:
  ParsedFile& file_;
  std::vector<std::string>& violations_;
  std::set<std::string> used_;
};

// A value given either directly (ps^-1) or in meV; at most one of the two.
std::optional<double> rate_value(Reader& r, std::vector<std::string>& violations,
                                 const std::string& key, const std::string& key_mev) {
  const bool direct = r.has(key);
  const bool mev = r.has(key_mev);
  if (direct && mev) {
    violations.push_back("specify either " + key + " or " + key_mev + ", not both");
    r.raw(key);
    r.raw(key_mev);
    return std::nullopt;
  }
  if (direct) return r.number(key);
  if (mev) {
    const auto x = r.number(key_mev);
    if (!x) return std::nullopt;
    return mev_to_ps_inv(*x);
  }
  return std::nullopt;
}

void check(std::vector<std::string>& violations, bool ok, const std::string& msg) {
  if (!ok) violations.push_back(msg);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::kSpectrum: return "spectrum";
    case Task::kIndistinguishability: return "indistinguishability";
    case Task::kEfficiency: return "efficiency";
    case Task::kVarpol: return "varpol";
    case Task::kRates: return "rates";
    case Task::kSweep: return "sweep";
    case Task::kRegimeMap: return "regime-map";
  }
  return "?";
}

std::string to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::kG: return "g";
    case SweepVariable::kKappa: return "kappa";
    case SweepVariable::kGamma: return "gamma";
    case SweepVariable::kGammaStar: return "gamma_star";
    case SweepVariable::kDelta: return "delta";
    case SweepVariable::kTemperature: return "temperature";
    case SweepVariable::kAlpha: return "alpha";
    case SweepVariable::kXi: return "xi";
  }
  return "?";
}

std::string to_string(SweepObservable observable) {
  switch (observable) {
    case SweepObservable::kVarpol: return "varpol";
    case SweepObservable::kRates: return "rates";
    case SweepObservable::kEfficiency: return "efficiency";
    case SweepObservable::kIndistinguishability: return "indistinguishability";
    case SweepObservable::kSideband: return "sideband";
  }
  return "?";
}

RunConfig parse_and_validate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_and_validate_text(buf.str(), path.string());
}

RunConfig parse_and_validate_text(const std::string& text, const std::string& origin) {
  ParsedFile file = parse_ini(text, origin);
  std::vector<std::string> violations = std::move(file.violations);
  Reader r(file, violations);
  RunConfig cfg;
  cfg.raw_text = text;

  // --- task -----------------------------------------------------------------
  bool have_task = false;
  if (const auto t = r.raw("task.type")) {
    const std::string s = lower(*t);
    have_task = true;
    if (s == "spectrum") cfg.task = Task::kSpectrum;
    else if (s == "indistinguishability") cfg.task = Task::kIndistinguishability;
    else if (s == "efficiency") cfg.task = Task::kEfficiency;
    else if (s == "varpol") cfg.task = Task::kVarpol;
    else if (s == "rates") cfg.task = Task::kRates;
    else if (s == "sweep") cfg.task = Task::kSweep;
    else if (s == "regime-map" || s == "regime_map") cfg.task = Task::kRegimeMap;
    else {
      have_task = false;
      violations.push_back("task.type: unknown task '" + *t +
                           "' (expected spectrum, indistinguishability, efficiency, varpol, "
                           "rates, sweep, or regime-map)");
    }
  } else {
    violations.push_back("task.type: required field is missing");
  }

  // --- bath -----------------------------------------------------------------
  auto& bath = cfg.settings.bath;
  if (const auto x = r.number("bath.alpha")) bath.alpha = *x;
  if (const auto x = rate_value(r, violations, "bath.xi", "bath.xi_mev")) bath.xi = *x;
  if (const auto x = r.number("bath.temperature")) bath.temperature = *x;
  if (const auto x = r.number("bath.mu")) bath.mu = *x;
  if (const auto x = r.number("bath.nu_max")) bath.nu_max = *x;
  if (const auto x = r.integer("bath.n_quad")) bath.n_quad = *x;
  check(violations, bath.alpha >= 0.0, "bath.alpha: must be >= 0");
  check(violations, bath.xi > 0.0, "bath.xi: must be > 0");
  check(violations, bath.temperature >= 0.0, "bath.temperature: must be >= 0");
  check(violations, bath.mu >= 0.0, "bath.mu: must be >= 0");
  check(violations, bath.nu_max == 0.0 || bath.nu_max >= 5.0 * bath.xi,
        "bath.nu_max: must be 0 (automatic) or at least 5*xi");
  check(violations, bath.n_quad >= 16, "bath.n_quad: must be at least 16");

  // --- system ---------------------------------------------------------------
  auto& system = cfg.settings.system;
  bool have_g = false;
  bool have_kappa = false;
  if (const auto p = r.raw("system.preset")) {
    if (const auto* preset = presets::find_preset(*p)) {
      system.g = preset->g_ps_inv();
      bath.xi = preset->xi_ps_inv();
      have_g = true;
    } else {
      violations.push_back("system.preset: unknown preset '" + *p + "'");
    }
  }
  if (const auto x = rate_value(r, violations, "system.g", "system.g_mev")) {
    system.g = *x;
    have_g = true;
  }
  if (const auto x = rate_value(r, violations, "system.kappa", "system.kappa_mev")) {
    system.kappa = *x;
    have_kappa = true;
  }
  if (const auto x = rate_value(r, violations, "system.gamma", "system.gamma_mev")) system.gamma = *x;
  if (const auto x = rate_value(r, violations, "system.delta", "system.delta_mev"))
    system.delta = *x;
  if (r.has("system.gamma_star") &&
      lower(trim(file.entries.at("system.gamma_star"))) == "auto") {
    r.raw("system.gamma_star");
    cfg.gamma_star_auto = true;
  } else if (const auto x =
                 rate_value(r, violations, "system.gamma_star", "system.gamma_star_mev")) {
    system.gamma_star = *x;
    cfg.gamma_star_auto = false;
  }
  if (const auto b = r.boolean("system.pin_resonance")) cfg.pin_resonance = *b;
  const bool scalars_needed = cfg.task != Task::kRegimeMap && cfg.task != Task::kVarpol &&
                              cfg.task != Task::kRates;
  if (!have_g && cfg.task != Task::kRegimeMap)
    violations.push_back("system.g: required field is missing");
  if (!have_kappa && scalars_needed)
    violations.push_back("system.kappa: required field is missing");
  check(violations, system.g >= 0.0, "system.g: must be >= 0");
  check(violations, system.kappa >= 0.0, "system.kappa: must be >= 0");
  check(violations, system.gamma >= 0.0, "system.gamma: must be >= 0");
  check(violations, system.gamma_star >= 0.0, "system.gamma_star: must be >= 0");

  // --- engine ---------------------------------------------------------------
  auto& s = cfg.settings;
  if (const auto x = r.number("engine.dt")) s.dt = *x;
  if (const auto x = r.number("engine.t_max")) s.t_max = *x;
  if (const auto x = r.integer("engine.max_steps")) s.max_steps = *x;
  if (const auto x = r.number("engine.svd_cutoff")) s.svd_cutoff = *x;
  if (const auto x = r.number("engine.memory_tolerance")) s.memory_tolerance = *x;
  if (const auto x = r.integer("engine.bond_cap")) s.bond_cap = *x;
  if (const auto x = r.raw("engine.cache_dir")) s.cache_dir = *x;
  if (const auto x = r.integer("engine.padding")) cfg.padding = *x;
  check(violations, s.dt >= 0.0, "engine.dt: must be >= 0 (0 selects automatic)");
  check(violations, s.t_max >= 0.0, "engine.t_max: must be >= 0 (0 selects automatic)");
  check(violations, s.max_steps >= 1, "engine.max_steps: must be >= 1");
  check(violations, s.svd_cutoff >= 0.0 && s.svd_cutoff < 1.0,
        "engine.svd_cutoff: must lie in [0, 1)");
  check(violations, s.memory_tolerance > 0.0, "engine.memory_tolerance: must be > 0");
  check(violations, s.bond_cap >= 4, "engine.bond_cap: must be >= 4");
  check(violations, cfg.padding >= 1, "engine.padding: must be >= 1");

  // --- sweep ----------------------------------------------------------------
  const bool sweep_section_present =
      r.has("sweep.variable") || r.has("sweep.values") || r.has("sweep.observable") ||
      r.has("sweep.pin_kappa_to_4g");
  if (cfg.task == Task::kSweep) {
    if (const auto v = r.raw("sweep.variable")) {
      const std::string sv = lower(*v);
      if (sv == "g") cfg.sweep.variable = SweepVariable::kG;
      else if (sv == "kappa") cfg.sweep.variable = SweepVariable::kKappa;
      else if (sv == "gamma") cfg.sweep.variable = SweepVariable::kGamma;
      else if (sv == "gamma_star") cfg.sweep.variable = SweepVariable::kGammaStar;
      else if (sv == "delta") cfg.sweep.variable = SweepVariable::kDelta;
      else if (sv == "temperature") cfg.sweep.variable = SweepVariable::kTemperature;
      else if (sv == "alpha") cfg.sweep.variable = SweepVariable::kAlpha;
      else if (sv == "xi") cfg.sweep.variable = SweepVariable::kXi;
      else
        violations.push_back("sweep.variable: unknown variable '" + *v + "'");
    } else {
      violations.push_back("sweep.variable: required for task=sweep");
    }
    if (const auto vals = r.number_list("sweep.values")) {
      cfg.sweep.values = *vals;
      check(violations, cfg.sweep.values.size() >= 2, "sweep.values: need at least 2 values");
    } else if (!r.has("sweep.values")) {
      violations.push_back("sweep.values: required for task=sweep");
    }
    if (const auto o = r.raw("sweep.observable")) {
      const std::string so = lower(*o);
      if (so == "varpol") cfg.sweep.observable = SweepObservable::kVarpol;
      else if (so == "rates") cfg.sweep.observable = SweepObservable::kRates;
      else if (so == "efficiency") cfg.sweep.observable = SweepObservable::kEfficiency;
      else if (so == "indistinguishability")
        cfg.sweep.observable = SweepObservable::kIndistinguishability;
      else if (so == "sideband") cfg.sweep.observable = SweepObservable::kSideband;
      else
        violations.push_back("sweep.observable: unknown observable '" + *o + "'");
    } else {
      violations.push_back("sweep.observable: required for task=sweep");
    }
    if (const auto b = r.boolean("sweep.pin_kappa_to_4g")) cfg.sweep.pin_kappa_to_4g = *b;
  } else if (sweep_section_present) {
    violations.push_back("sweep.*: sweep keys are only valid with task.type = sweep");
    r.raw("sweep.variable");
    r.raw("sweep.values");
    r.raw("sweep.observable");
    r.raw("sweep.pin_kappa_to_4g");
  }

  // --- output ---------------------------------------------------------------
  if (const auto d = r.raw("output.directory")) cfg.output.directory = *d;
  if (const auto f = r.raw("output.formats")) {
    cfg.output.csv = false;
    cfg.output.json = false;
    std::istringstream in(*f);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      tok = lower(trim(tok));
      if (tok.empty()) continue;
      if (tok == "csv") cfg.output.csv = true;
      else if (tok == "json") cfg.output.json = true;
      else violations.push_back("output.formats: unknown format '" + tok + "'");
    }
    check(violations, cfg.output.csv || cfg.output.json,
          "output.formats: need at least one of csv, json");
  }

  r.report_unknown();

  // Resolve the automatic dephasing rate once the bath is known to be valid.
  if (violations.empty() && cfg.gamma_star_auto) {
    system.gamma_star = bath::pure_dephasing_rate(bath);
  }

  if (!violations.empty()) {
    std::sort(violations.begin(), violations.end());
    violations.erase(std::unique(violations.begin(), violations.end()), violations.end());
    throw ValidationError(std::move(violations));
  }

  // --- echo -----------------------------------------------------------------
  std::ostringstream echo;
  echo << "task = " << to_string(cfg.task) << "\n";
  echo << "bath.alpha = " << fmt(bath.alpha) << " ps^2\n";
  echo << "bath.xi = " << fmt(bath.xi) << " ps^-1 (" << fmt(ps_inv_to_mev(bath.xi)) << " meV)\n";
  echo << "bath.temperature = " << fmt(bath.temperature) << " K\n";
  echo << "bath.mu = " << fmt(bath.mu) << " ps^2\n";
  echo << "bath.nu_max = "
       << (bath.nu_max > 0.0 ? fmt(bath.nu_max) + " ps^-1" : std::string("auto (8*xi)")) << "\n";
  echo << "bath.n_quad = " << bath.n_quad << "\n";
  if (cfg.task != Task::kRegimeMap) {
    echo << "system.g = " << fmt(system.g) << " ps^-1 (" << fmt(ps_inv_to_mev(system.g))
         << " meV)\n";
    echo << "system.kappa = " << fmt(system.kappa) << " ps^-1 ("
         << fmt(ps_inv_to_mev(system.kappa)) << " meV)\n";
    echo << "system.gamma = " << fmt(system.gamma) << " ps^-1\n";
    echo << "system.gamma_star = " << fmt(system.gamma_star) << " ps^-1"
         << (cfg.gamma_star_auto ? " (auto from bath)" : "") << "\n";
    echo << "system.delta = " << fmt(system.delta) << " ps^-1"
         << (cfg.pin_resonance ? " (re-pinned to polaron resonance per run)" : "") << "\n";
    echo << "engine.dt = " << (s.dt > 0.0 ? fmt(s.dt) + " ps" : std::string("auto")) << "\n";
    echo << "engine.t_max = " << (s.t_max > 0.0 ? fmt(s.t_max) + " ps" : std::string("auto"))
         << "\n";
    echo << "engine.svd_cutoff = " << fmt(s.svd_cutoff) << "\n";
    echo << "engine.memory_tolerance = " << fmt(s.memory_tolerance) << "\n";
  }
  if (cfg.task == Task::kSweep) {
    echo << "sweep.variable = " << to_string(cfg.sweep.variable) << "\n";
    echo << "sweep.observable = " << to_string(cfg.sweep.observable) << "\n";
    echo << "sweep.points = " << cfg.sweep.values.size() << "\n";
    echo << "sweep.pin_kappa_to_4g = " << (cfg.sweep.pin_kappa_to_4g ? "true" : "false") << "\n";
  }
  echo << "output.directory = " << cfg.output.directory.string() << "\n";
  cfg.echo = echo.str();
  return cfg;
}

}  // namespace ptqed::config
