#include "ptqed/runner.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "ptqed/constants.hpp"
#include "ptqed/errors.hpp"
#include "ptqed/hash.hpp"
#include "ptqed/observables.hpp"
#include "ptqed/presets.hpp"
#include "ptqed/rates.hpp"
#include "ptqed/varpol.hpp"

namespace ptqed::runner {

namespace {

using nlohmann::json;

#ifndef PTQED_VERSION
#define PTQED_VERSION "0.0.0"
#endif

constexpr int kMaxRefinements = 3;
constexpr double kLadderTolerance = 1e-3;  // relative metric drift between rungs
constexpr std::size_t kGridCsvCellLimit = 250'000;  // skip grid.csv beyond this

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One output file assembled in memory so it can be hashed before writing.
struct OutFile {
  std::string name;
  std::string content;
};

class CsvBuilder {
 public:
  explicit CsvBuilder(std::string header) : out_(std::move(header)) { out_ += '\n'; }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ += ',';
      out_ += fmt17(values[i]);
    }
    out_ += '\n';
  }

  void raw_row(const std::string& line) {
    out_ += line;
    out_ += '\n';
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

std::string populations_csv(const pt::PopulationSeries& series) {
  CsvBuilder csv("t_ps,cavity_population,exciton_population");
  for (std::size_t i = 0; i < series.t.size(); ++i)
    csv.row({series.t[i], series.cavity_population[i], series.exciton_population[i]});
  return csv.take();
}

std::string spectrum_csv(const obs::Spectrum& spectrum) {
  CsvBuilder csv("omega_ps_inv,S");
  for (std::size_t i = 0; i < spectrum.omega.size(); ++i)
    csv.row({spectrum.omega[i], spectrum.values[i]});
  return csv.take();
}

std::string grid_csv(const pt::CorrelationGrid& grid) {
  CsvBuilder csv("t1,t2,re,im");
  for (int i = 0; i <= grid.steps; ++i)
    for (int j = 0; j <= grid.steps; ++j)
      csv.row({grid.dt * i, grid.dt * j, grid.g(i, j).real(), grid.g(i, j).imag()});
  return csv.take();
}

json varpol_json(const vp::VarpolSolution& sol) {
  return json{{"b_factor", sol.b_factor},
              {"shift", sol.shift},
              {"g_eff", sol.g_eff},
              {"delta_eff", sol.delta_eff},
              {"eta_eff", sol.eta_eff},
              {"free_energy", sol.free_energy},
              {"delta_used", sol.delta_used},
              {"iterations", sol.iterations},
              {"residual", sol.residual}};
}

// System parameters with the run-time conditions applied: automatic dephasing
// from the bath and the polaron-resonance detuning pin.
struct ResolvedPoint {
  sys::SystemParams system;
  vp::VarpolSolution sol;
};

ResolvedPoint resolve_point(const bath::BathSpec& bath, sys::SystemParams system,
                            bool gamma_star_auto, bool pin_resonance) {
  if (gamma_star_auto) system.gamma_star = bath::pure_dephasing_rate(bath);
  vp::VarpolParams vparams;
  vparams.g = system.g;
  vparams.delta = system.delta;
  vparams.pin_resonance = pin_resonance;
  ResolvedPoint point;
  point.sol = vp::solve(bath, vparams);
  system.delta = point.sol.delta_used;
  point.system = system;
  return point;
}

// Product of one engine-backed run: scalar metric for the refinement ladder
// plus everything needed to emit files from the final rung.
struct EngineProduct {
  double metric = 0.0;
  double dt_used = 0.0;
  double t_span = 0.0;
  json engine_info;
  json summary;
  std::vector<OutFile> files;
};

json engine_info_json(const engine::Prepared& prep, const engine::Dynamics& dyn) {
  return json{{"dt", prep.dt},
              {"steps", prep.steps},
              {"steps_used", dyn.steps_used},
              {"memory_steps", prep.tensor.memory_steps},
              {"max_bond", prep.tensor.max_bond()},
              {"svd_cutoff", prep.tensor.svd_cutoff},
              {"from_cache", prep.from_cache},
              {"decayed", dyn.decayed},
              {"max_trace_deviation", dyn.populations.max_trace_deviation},
              {"max_hermiticity_deviation", dyn.populations.max_hermiticity_deviation}};
}

EngineProduct run_efficiency(const engine::SimulationSettings& settings,
                             const ResolvedPoint& point) {
  engine::SimulationSettings s = settings;
  s.system = point.system;
  const engine::Prepared prep = engine::prepare(s);
  const engine::Dynamics dyn = engine::run_populations(prep, point.system);
  const double eta = obs::quantum_efficiency(dyn.populations, point.system.kappa);
  const rates::PurcellQuantities purcell = rates::purcell_quantities(point.system);

  EngineProduct out;
  out.metric = eta;
  out.dt_used = prep.dt;
  out.t_span = prep.dt * dyn.steps_used;
  out.engine_info = engine_info_json(prep, dyn);
  out.summary = json{{"efficiency", eta},
                     {"purcell_rate", purcell.rate},
                     {"purcell_efficiency", purcell.efficiency},
                     {"varpol", varpol_json(point.sol)}};
  out.files.push_back({"populations.csv", populations_csv(dyn.populations)});
  return out;
}

EngineProduct run_indistinguishability(const engine::SimulationSettings& settings,
                                       const ResolvedPoint& point, bool emit_grid) {
  engine::SimulationSettings s = settings;
  s.system = point.system;
  const engine::Prepared prep = engine::prepare(s);
  const engine::Dynamics dyn = engine::run_populations(prep, point.system);
  const pt::CorrelationGrid grid =
      engine::run_correlation_grid(prep, point.system, dyn.steps_used);
  const double value = obs::indistinguishability(grid, point.system.kappa);
  const double eta = obs::quantum_efficiency(grid, point.system.kappa);

  EngineProduct out;
  out.metric = value;
  out.dt_used = prep.dt;
  out.t_span = prep.dt * dyn.steps_used;
  out.engine_info = engine_info_json(prep, dyn);
  out.summary = json{{"indistinguishability", value},
                     {"efficiency", eta},
                     {"varpol", varpol_json(point.sol)}};
  out.files.push_back({"populations.csv", populations_csv(dyn.populations)});
  const std::size_t cells = static_cast<std::size_t>(grid.steps + 1) *
                            static_cast<std::size_t>(grid.steps + 1);
  if (emit_grid && cells <= kGridCsvCellLimit)
    out.files.push_back({"grid.csv", grid_csv(grid)});
  return out;
}

EngineProduct run_spectrum(const engine::SimulationSettings& settings, const ResolvedPoint& point,
                           int padding) {
  engine::SimulationSettings s = settings;
  s.system = point.system;
  const engine::Prepared prep = engine::prepare(s);
  const engine::Dynamics dyn = engine::run_populations(prep, point.system);
  const pt::CorrelationGrid grid =
      engine::run_correlation_grid(prep, point.system, dyn.steps_used);
  obs::SpectrumOptions opts;
  opts.padding = padding;
  const obs::Spectrum spectrum = obs::emission_spectrum(grid, point.system.kappa, opts);

  EngineProduct out;
  out.metric = spectrum.efficiency;
  out.dt_used = prep.dt;
  out.t_span = prep.dt * dyn.steps_used;
  out.engine_info = engine_info_json(prep, dyn);
  out.summary = json{{"efficiency", spectrum.efficiency},
                     {"norm", spectrum.norm},
                     {"raw_norm_ratio", spectrum.raw_norm_ratio},
                     {"negative_clip", spectrum.negative_clip},
                     {"varpol", varpol_json(point.sol)}};
  if (const auto a = obs::polariton_asymmetry(spectrum, point.sol.g_eff)) {
    out.summary["asymmetry"] = *a;
  } else {
    out.summary["asymmetry"] = nullptr;
  }
  try {
    // In the Purcell regime the single line is collected through the cavity
    // response, so hand the analysis the known filter half-width; in strong
    // coupling the lineshape does not factorize that way and none is passed.
    const double filter_hw =
        point.system.kappa >= 2.0 * point.system.g ? 0.5 * point.system.kappa : 0.0;
    const obs::SidebandAnalysis sb =
        obs::sideband_analysis(spectrum, obs::default_line_halfwidth(point.system), filter_hw);
    out.summary["sideband_fraction"] = sb.fraction;
    out.summary["sideband_red_fraction"] = sb.red_fraction;
    out.summary["line_fwhm"] = sb.line_fwhm;
    out.summary["line_center"] = sb.line_center;
  } catch (const UsageError&) {
    out.summary["sideband_fraction"] = nullptr;
  }
  out.files.push_back({"spectrum.csv", spectrum_csv(spectrum)});
  out.files.push_back({"populations.csv", populations_csv(dyn.populations)});
  return out;
}

// Run an engine-backed task, optionally climbing the refinement ladder until
// the metric drifts by less than 0.1% between consecutive rungs.
template <typename Fn>
EngineProduct with_ladder(engine::SimulationSettings settings, bool converge, Fn&& fn,
                          json& convergence) {
  json rungs = json::array();
  EngineProduct cur = fn(settings);
  rungs.push_back({{"dt", cur.dt_used},
                   {"svd_cutoff", settings.svd_cutoff},
                   {"metric", cur.metric},
                   {"max_bond", cur.engine_info.value("max_bond", 0)}});
  double drift = 0.0;
  bool converged = !converge;
  if (converge) {
    std::vector<double> history{cur.metric};
    for (int k = 0; k < kMaxRefinements; ++k) {
      settings = engine::refined(settings, cur.dt_used, cur.t_span);
      EngineProduct next = fn(settings);
      rungs.push_back({{"dt", next.dt_used},
                       {"svd_cutoff", settings.svd_cutoff},
                       {"metric", next.metric},
                       {"max_bond", next.engine_info.value("max_bond", 0)}});
      drift = std::abs(next.metric - cur.metric) / std::max(std::abs(next.metric), 1e-12);
      history.push_back(next.metric);
      cur = std::move(next);
      if (drift < kLadderTolerance) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericalError("refinement ladder did not reach < 0.1% drift after " +
                               std::to_string(kMaxRefinements) + " refinements",
                           history);
  }
  convergence = json{{"mode", converge ? "ladder" : "fixed"},
                     {"rungs", std::move(rungs)},
                     {"drift", drift},
                     {"converged", converged}};
  return cur;
}

// --- sweep machinery --------------------------------------------------------

std::vector<std::string> sweep_columns(config::SweepObservable obs) {
  switch (obs) {
    case config::SweepObservable::kVarpol:
      return {"sweep_value", "b_factor", "shift", "g_eff", "delta_eff", "eta_eff", "free_energy"};
    case config::SweepObservable::kRates:
      return {"sweep_value", "eps_zz", "eps_yy", "eps_zy", "gamma_a", "zz_closed_form"};
    case config::SweepObservable::kEfficiency:
      return {"sweep_value", "efficiency", "purcell_rate", "purcell_efficiency"};
    case config::SweepObservable::kIndistinguishability:
      return {"sweep_value", "indistinguishability", "efficiency"};
    case config::SweepObservable::kSideband:
      return {"sweep_value", "sideband_fraction", "red_fraction", "line_fwhm", "line_center"};
  }
  return {};
}

void apply_sweep_value(engine::SimulationSettings& s, config::SweepVariable variable, double v) {
  switch (variable) {
    case config::SweepVariable::kG: s.system.g = v; break;
    case config::SweepVariable::kKappa: s.system.kappa = v; break;
    case config::SweepVariable::kGamma: s.system.gamma = v; break;
    case config::SweepVariable::kGammaStar: s.system.gamma_star = v; break;
    case config::SweepVariable::kDelta: s.system.delta = v; break;
    case config::SweepVariable::kTemperature: s.bath.temperature = v; break;
    case config::SweepVariable::kAlpha: s.bath.alpha = v; break;
    case config::SweepVariable::kXi: s.bath.xi = v; break;
  }
}

std::vector<double> sweep_point(const config::RunConfig& cfg,
                                const engine::SimulationSettings& base, double value) {
  engine::SimulationSettings s = base;
  apply_sweep_value(s, cfg.sweep.variable, value);
  if (cfg.sweep.pin_kappa_to_4g) s.system.kappa = 4.0 * s.system.g;
  s.validate();
  // A swept dephasing rate or detuning must not be overwritten by the
  // automatic resolution.
  const bool gs_auto =
      cfg.gamma_star_auto && cfg.sweep.variable != config::SweepVariable::kGammaStar;
  const bool pin_delta =
      cfg.pin_resonance && cfg.sweep.variable != config::SweepVariable::kDelta;
  const ResolvedPoint point = resolve_point(s.bath, s.system, gs_auto, pin_delta);

  switch (cfg.sweep.observable) {
    case config::SweepObservable::kVarpol: {
      const auto& sol = point.sol;
      return {value, sol.b_factor, sol.shift, sol.g_eff, sol.delta_eff, sol.eta_eff,
              sol.free_energy};
    }
    case config::SweepObservable::kRates: {
      const rates::RateBreakdown rb = rates::epsilon_contributions(point.sol, s.bath, point.system);
      const rates::DifferentialRate dr =
          rates::differential_polariton_rate(point.sol, s.bath, point.system);
      return {value, rb.eps_zz, rb.eps_yy, rb.eps_zy, rb.gamma_a, dr.zz_closed_form};
    }
    case config::SweepObservable::kEfficiency: {
      const EngineProduct product = run_efficiency(s, point);
      return {value, product.summary.at("efficiency").get<double>(),
              product.summary.at("purcell_rate").get<double>(),
              product.summary.at("purcell_efficiency").get<double>()};
    }
    case config::SweepObservable::kIndistinguishability: {
      const EngineProduct product = run_indistinguishability(s, point, false);
      return {value, product.summary.at("indistinguishability").get<double>(),
              product.summary.at("efficiency").get<double>()};
    }
    case config::SweepObservable::kSideband: {
      const EngineProduct product = run_spectrum(s, point, cfg.padding);
      const json& sm = product.summary;
      if (sm.at("sideband_fraction").is_null())
        throw UsageError("sideband analysis not applicable at this sweep point");
      return {value, sm.at("sideband_fraction").get<double>(),
              sm.at("sideband_red_fraction").get<double>(), sm.at("line_fwhm").get<double>(),
              sm.at("line_center").get<double>()};
    }
  }
  throw std::logic_error("unhandled sweep observable");
}

}  // namespace

int resolve_workers(const RunOptions& opts) {
  int workers = opts.workers;
  if (const char* env = std::getenv("PTQED_WORKERS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1 && parsed <= 4096)
      workers = static_cast<int>(parsed);
  }
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, workers);
}

RunOutcome execute(const config::RunConfig& cfg, const RunOptions& opts) {
  const std::filesystem::path out_dir =
      opts.out_override.empty() ? cfg.output.directory : opts.out_override;
  engine::SimulationSettings settings = cfg.settings;
  if (settings.cache_dir.empty()) settings.cache_dir = out_dir / ".ptcache";
  const int workers = resolve_workers(opts);

  std::vector<OutFile> files;
  json summary;
  json engine_info;
  json convergence;
  json failures = json::array();

  switch (cfg.task) {
    case config::Task::kVarpol: {
      const ResolvedPoint point =
          resolve_point(settings.bath, settings.system, cfg.gamma_star_auto, cfg.pin_resonance);
      summary = {{"varpol", varpol_json(point.sol)},
                 {"gamma_star", point.system.gamma_star}};
      CsvBuilder csv("nu_ps_inv,displacement");
      for (std::size_t i = 0; i < point.sol.grid.x.size(); ++i)
        csv.row({point.sol.grid.x[i], point.sol.profile[i]});
      files.push_back({"profile.csv", csv.take()});
      break;
    }
    case config::Task::kRates: {
      const ResolvedPoint point =
          resolve_point(settings.bath, settings.system, cfg.gamma_star_auto, true);
      const rates::RateBreakdown rb =
          rates::epsilon_contributions(point.sol, settings.bath, point.system);
      const rates::DifferentialRate dr =
          rates::differential_polariton_rate(point.sol, settings.bath, point.system);
      summary = {{"eps_zz", rb.eps_zz},
                 {"eps_yy", rb.eps_yy},
                 {"eps_zy", rb.eps_zy},
                 {"gamma_a", rb.gamma_a},
                 {"zz_closed_form", dr.zz_closed_form},
                 {"varpol", varpol_json(point.sol)}};
      CsvBuilder csv("eps_zz,eps_yy,eps_zy,gamma_a,zz_closed_form");
      csv.row({rb.eps_zz, rb.eps_yy, rb.eps_zy, rb.gamma_a, dr.zz_closed_form});
      files.push_back({"rates.csv", csv.take()});
      break;
    }
    case config::Task::kRegimeMap: {
      CsvBuilder csv("name,hbar_g_mev,hbar_xi_mev,two_g_over_xi,decoupled");
      json rows = json::array();
      for (const auto& p : presets::material_presets()) {
        const double ratio = 2.0 * p.hbar_g_mev / p.hbar_xi_mev;
        csv.raw_row(p.name + ',' + fmt17(p.hbar_g_mev) + ',' + fmt17(p.hbar_xi_mev) + ',' +
                    fmt17(ratio) + ',' + (p.phonon_decoupled() ? "1" : "0"));
        rows.push_back({{"name", p.name},
                        {"hbar_g_mev", p.hbar_g_mev},
                        {"hbar_xi_mev", p.hbar_xi_mev},
                        {"two_g_over_xi", ratio},
                        {"decoupled", p.phonon_decoupled()},
                        {"source", p.source}});
      }
      files.push_back({"regime_map.csv", csv.take()});
      // Bowtie-cavity coupling recomputed from electromagnetic mode parameters.
      const auto mv = rates::ModeVolumeParams::from_lambda_cubed(9e-29, 950e-9, 12.25, 7.01e-5);
      const rates::CouplingEstimate est = rates::coupling_from_mode_volume(mv);
      summary = {{"presets", std::move(rows)},
                 {"bowtie_recomputed_hbar_g_mev", est.hbar_g_mev},
                 {"bowtie_recomputed_g_ps_inv", est.g_ps_inv}};
      break;
    }
    case config::Task::kEfficiency:
    case config::Task::kIndistinguishability:
    case config::Task::kSpectrum: {
      const ResolvedPoint point =
          resolve_point(settings.bath, settings.system, cfg.gamma_star_auto, cfg.pin_resonance);
      auto task_fn = [&](const engine::SimulationSettings& s) -> EngineProduct {
        // Re-resolve nothing per rung: the refinement changes only dt/cutoff.
        if (cfg.task == config::Task::kEfficiency) return run_efficiency(s, point);
        if (cfg.task == config::Task::kIndistinguishability)
          return run_indistinguishability(s, point, true);
        return run_spectrum(s, point, cfg.padding);
      };
      EngineProduct product = with_ladder(settings, opts.converge, task_fn, convergence);
      summary = std::move(product.summary);
      engine_info = std::move(product.engine_info);
      files.insert(files.end(), std::make_move_iterator(product.files.begin()),
                   std::make_move_iterator(product.files.end()));
      break;
    }
    case config::Task::kSweep: {
      const std::size_t n = cfg.sweep.values.size();
      std::vector<std::optional<std::vector<double>>> rows(n);
      std::vector<std::string> errors(n);
      std::atomic<std::size_t> cursor{0};
      const int pool = std::min<int>(workers, static_cast<int>(n));
      auto work = [&]() {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= n) return;
          try {
            rows[i] = sweep_point(cfg, settings, cfg.sweep.values[i]);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        }
      };
      if (pool <= 1) {
        work();
      } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(pool));
        for (int t = 0; t < pool; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
      }

      std::string header;
      for (const auto& col : sweep_columns(cfg.sweep.observable)) {
        if (!header.empty()) header += ',';
        header += col;
      }
      CsvBuilder csv(header);
      std::size_t ok = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (rows[i]) {
          csv.row(*rows[i]);
          ++ok;
        } else {
          failures.push_back(
              {{"point", i}, {"sweep_value", cfg.sweep.values[i]}, {"error", errors[i]}});
        }
      }
      files.push_back({"sweep.csv", csv.take()});
      summary = {{"observable", config::to_string(cfg.sweep.observable)},
                 {"variable", config::to_string(cfg.sweep.variable)},
                 {"points", n},
                 {"succeeded", ok},
                 {"pin_kappa_to_4g", cfg.sweep.pin_kappa_to_4g}};
      break;
    }
  }

  if (cfg.output.json) {
    files.push_back({"summary.json", summary.dump(2) + "\n"});
  }
  if (!cfg.output.csv) {
    std::erase_if(files, [](const OutFile& f) { return f.name.ends_with(".csv"); });
  }

  // Manifest: configuration hash, per-file content hashes, engine/convergence
  // diagnostics, and any per-point failures.
  json manifest;
  manifest["version"] = PTQED_VERSION;
  manifest["task"] = config::to_string(cfg.task);
  manifest["config_hash"] = to_hex(fnv1a(cfg.raw_text));
  manifest["workers"] = workers;
  json listed = json::array();
  for (const auto& f : files)
    listed.push_back({{"file", f.name}, {"fnv1a", to_hex(fnv1a(f.content))}});
  manifest["outputs"] = std::move(listed);
  if (!engine_info.is_null()) manifest["engine"] = engine_info;
  if (!convergence.is_null()) manifest["convergence"] = convergence;
  manifest["failures"] = failures;

  std::filesystem::create_directories(out_dir);
  RunOutcome outcome;
  for (const auto& f : files) {
    const std::filesystem::path path = out_dir / f.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write output file: " + path.string());
    out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
    if (!out) throw ResourceError("short write on output file: " + path.string());
    outcome.files.push_back(path);
  }
  {
    const std::filesystem::path path = out_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write output file: " + path.string());
    const std::string text = manifest.dump(2) + "\n";
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    outcome.files.push_back(path);
  }

  const std::size_t n_failures = failures.size();
  outcome.exit_code = n_failures == 0 ? 0 : 3;
  std::ostringstream note;
  note << config::to_string(cfg.task) << ": wrote " << outcome.files.size() << " file(s) to "
       << out_dir.string();
  if (n_failures > 0) note << " (" << n_failures << " sweep point(s) failed)";
  outcome.summary = note.str();
  return outcome;
}

}  // namespace ptqed::runner
