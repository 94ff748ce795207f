#pragma once

// Registry of runnable checks. Each name maps to one library operation.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cylint/cli/config.hpp"
#include "cylint/cylsemi.hpp"
#include "cylint/integrands.hpp"
#include "cylint/path_io.hpp"

namespace cylint::cli {

struct CheckInfo {
  std::string_view name;
  std::string_view operation;
  std::string_view description;
};

/// Stable order; list-checks prints it as is.
std::span<const CheckInfo> check_registry();
const CheckInfo* find_check(std::string_view name);

struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  nlohmann::json report;
  std::vector<CsvTable> tables;
  /// Optional path export (path file format), one entry per scenario.
  std::vector<ScenarioPaths> paths;
};

/// One generated scenario: the integrator, the primal process when the
/// experiment needs one, and the realized experiment integrand.
struct ScenarioData {
  SeqSemimartingale x;
  std::optional<SeqPathPrimal> y;
  GridIntegrand h;
};

struct Experiment {
  ExperimentConfig config;
  std::vector<ScenarioData> scenarios;
};

/// Generates every scenario (in parallel, stored by index).
Experiment realize(const ExperimentConfig& config);

/// Realizes an integrand spec on one scenario grid. y is required for
/// left_limit.
GridIntegrand realize_integrand(const IntegrandSpec& spec, const GridPtr& grid, std::size_t dimension,
                                const SeqPathPrimal* y);

CheckOutcome run_check(const CheckInfo& check, const Experiment& experiment);

}  // namespace cylint::cli
