// Command-line front end: validates configurations, lists material presets,
// and executes simulation tasks defined in an INI-style config file.
#include <cstdio>
#include <exception>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ptqed/config.hpp"
#include "ptqed/errors.hpp"
#include "ptqed/presets.hpp"
#include "ptqed/runner.hpp"

namespace {

int cmd_validate(const std::string& path) {
  const ptqed::config::RunConfig cfg = ptqed::config::parse_and_validate(path);
  std::cout << cfg.echo << "configuration OK\n";
  return 0;
}

int cmd_run(const std::string& path, const ptqed::runner::RunOptions& opts) {
  const ptqed::config::RunConfig cfg = ptqed::config::parse_and_validate(path);
  std::cout << cfg.echo;
  const ptqed::runner::RunOutcome outcome = ptqed::runner::execute(cfg, opts);
  std::cout << outcome.summary << "\n";
  return outcome.exit_code;
}

int cmd_presets() {
  std::cout << std::left << std::setw(22) << "name" << std::right << std::setw(12)
            << "hbar_g_meV" << std::setw(13) << "hbar_xi_meV" << std::setw(11) << "g_ps^-1"
            << std::setw(11) << "xi_ps^-1" << std::setw(8) << "2g>xi"
            << "  source\n";
  for (const auto& p : ptqed::presets::material_presets()) {
    std::cout << std::left << std::setw(22) << p.name << std::right << std::fixed
              << std::setprecision(3) << std::setw(12) << p.hbar_g_mev << std::setw(13)
              << p.hbar_xi_mev << std::setw(11) << p.g_ps_inv() << std::setw(11) << p.xi_ps_inv()
              << std::setw(8) << (p.phonon_decoupled() ? "yes" : "no") << "  " << p.source
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emitter-cavity simulator with a numerically exact phonon environment"};
  app.require_subcommand(1);

  std::string config_path;
  ptqed::runner::RunOptions opts;
  std::string out_dir;
  bool seedless = false;

  CLI::App* run = app.add_subcommand("run", "execute the task described by a config file");
  run->add_option("config", config_path, "INI-style configuration file")->required();
  run->add_option("--workers", opts.workers,
                  "sweep worker threads (default: logical cores; env PTQED_WORKERS overrides)");
  run->add_option("--out", out_dir, "output directory (overrides output.directory)");
  run->add_flag("--converge", opts.converge,
                "refine dt and svd_cutoff until the task observable drifts < 0.1%");
  run->add_flag("--seedless", seedless,
                "reserved; the simulator is deterministic and uses no random numbers");

  CLI::App* validate = app.add_subcommand("validate", "parse and echo a config without running");
  validate->add_option("config", config_path, "INI-style configuration file")->required();

  app.add_subcommand("presets", "list the built-in material presets");

  CLI11_PARSE(app, argc, argv);
  opts.out_override = out_dir;

  try {
    if (run->parsed()) return cmd_run(config_path, opts);
    if (validate->parsed()) return cmd_validate(config_path);
    return cmd_presets();
  } catch (const ptqed::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
