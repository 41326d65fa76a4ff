// runner.hpp -- task execution: runs a validated configuration, writes CSV and
// JSON outputs plus a manifest with content hashes, fans sweep points out over
// a worker pool, and drives the optional refinement ladder.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ptqed/config.hpp"

namespace ptqed::runner {

struct RunOptions {
  int workers = 0;                     // 0 -> PTQED_WORKERS env var, else logical cores
  bool converge = false;               // refine dt and svd_cutoff until < 0.1% metric drift
  std::filesystem::path out_override;  // overrides output.directory when non-empty
};

struct RunOutcome {
  int exit_code = 0;  // 0 full success, 3 partial sweep failure
  std::vector<std::filesystem::path> files;  // all written files, manifest last
  std::string summary;                       // one-line completion note
};

// Worker count after flag/environment/default resolution (always >= 1).
int resolve_workers(const RunOptions& opts);

RunOutcome execute(const config::RunConfig& cfg, const RunOptions& opts);

}  // namespace ptqed::runner
