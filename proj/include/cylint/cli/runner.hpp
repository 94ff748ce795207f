#pragma once

// Subcommand implementations behind cylint-run.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cylint/cli/checks.hpp"
#include "cylint/cli/config.hpp"

namespace cylint::cli {

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitConfigError = 2 };

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> scenarios;
  bool quiet = false;
};

/// Loads the config and applies --seed / --scenarios. Throws ConfigError.
ExperimentConfig load_with_overrides(const RunOptions& options);

/// Runs every requested check and writes <check>.json, <check>_<table>.csv
/// and manifest.json into out_dir. Reports never contain the timestamp.
std::vector<CheckOutcome> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                         std::ostream& log, bool quiet);

int command_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int command_validate(const RunOptions& options, std::ostream& out, std::ostream& err);
/// Writes the generated integrator paths to out_dir/paths.csv.
int command_simulate(const RunOptions& options, std::ostream& out, std::ostream& err);
void command_list_checks(std::ostream& out);

}  // namespace cylint::cli
