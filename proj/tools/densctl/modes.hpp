#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "densctl/config.hpp"

namespace densctl::app {

struct RunOptions {
  int jobs = 1;
  /// Overrides the configured seeds (micro) or the sampling seed (basin).
  std::optional<std::uint64_t> seed;
  /// Overrides output.dir.
  std::optional<std::string> out_dir;
};

/// --jobs if given, else DENSCTL_JOBS, else 1.
int resolve_jobs(std::optional<int> flag);

/// Runs fn(i) for i in [0, count) on `jobs` threads. Exceptions are
/// rethrown after all workers stop, lowest index first.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

enum class ExitCode { ok = 0, config_error = 1, numerical_abort = 2 };

struct RunOutcome {
  ExitCode code = ExitCode::ok;
  /// Final artifact directory (empty on failure).
  std::string directory;
  std::string message;
};

/// Executes the configured mode and writes its artifacts into a fresh
/// timestamped subdirectory of the output root. Never throws for
/// configuration or numerical failures; these become exit codes and the
/// partial directory is removed.
RunOutcome run_mode(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace densctl::app
