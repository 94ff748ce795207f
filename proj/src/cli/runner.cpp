#include "cylint/cli/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cylint/path_io.hpp"
#include "cylint/rng.hpp"

namespace cylint::cli {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ostringstream s;
  for (std::size_t k = 0; k < t.columns.size(); ++k) s << (k ? "," : "") << t.columns[k];
  s << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) s << (k ? "," : "") << number(row[k]);
    s << '\n';
  }
  write_text(path, s.str());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void report_config_error(const RunOptions& o, const ConfigError& e, std::ostream& err) {
  err << "config error: " << o.config_path.string() << ": " << e.what() << '\n';
}

}  // namespace

ExperimentConfig load_with_overrides(const RunOptions& o) {
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) c.ensemble.master_seed = *o.seed;
  if (o.scenarios) c.ensemble.scenarios = *o.scenarios;
  validate(c);
  return c;
}

std::vector<CheckOutcome> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                         std::ostream& log, bool quiet) {
  std::filesystem::create_directories(out_dir);
  const Experiment experiment = realize(config);
  std::vector<CheckOutcome> outcomes;
  nlohmann::json summary = nlohmann::json::array();
  for (const std::string& name : config.checks) {
    const CheckInfo& info = *find_check(name);
    CheckOutcome o;
    try {
      o = run_check(info, experiment);
    } catch (const std::exception& e) {
      // Numeric failure: recorded as a failed check with its message.
      o.name = name;
      o.pass = false;
      o.report = {{"check", name}, {"operation", info.operation}, {"error", e.what()}};
    }
    o.report["pass"] = o.pass;
    nlohmann::json files = nlohmann::json::array({name + ".json"});
    write_text(out_dir / (name + ".json"), o.report.dump(2) + "\n");
    for (const CsvTable& t : o.tables) {
      const std::string file = name + "_" + t.name + ".csv";
      write_csv(out_dir / file, t);
      files.push_back(file);
    }
    if (!o.paths.empty()) {
      std::ostringstream s;
      write_paths_csv(s, o.paths);
      write_text(out_dir / (name + "_paths.csv"), s.str());
      files.push_back(name + "_paths.csv");
    }
    summary.push_back({{"check", name}, {"pass", o.pass}, {"files", files}});
    if (!quiet) log << (o.pass ? "PASS " : "FAIL ") << name << '\n';
    outcomes.push_back(std::move(o));
  }

  bool all = true;
  for (const CheckOutcome& o : outcomes) all = all && o.pass;
  nlohmann::json scenario_seeds = nlohmann::json::array();
  for (std::size_t s = 0; s < config.ensemble.scenarios; ++s) {
    scenario_seeds.push_back(Ensemble{config.ensemble.scenarios, config.ensemble.master_seed}.scenario_seed(s));
  }
  const nlohmann::json manifest{
      {"library", "cylint"},
      {"version", kVersion},
      {"config", to_json(config)},
      {"seeds", {{"master_seed", config.ensemble.master_seed}, {"scenario_seeds", scenario_seeds}}},
      {"checks", summary},
      {"all_pass", all},
      {"timestamp", utc_timestamp()},
  };
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return outcomes;
}

int command_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_with_overrides(o);
  } catch (const ConfigError& e) {
    report_config_error(o, e, err);
    return kExitConfigError;
  }
  std::vector<CheckOutcome> outcomes;
  try {
    outcomes = run_experiment(config, o.out_dir, out, o.quiet);
  } catch (const ConfigError& e) {
    report_config_error(o, e, err);
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  int status = kExitPass;
  for (const CheckOutcome& c : outcomes) {
    if (!c.pass) {
      err << "check failed: " << c.name << '\n';
      status = kExitCheckFailure;
    }
  }
  return status;
}

int command_validate(const RunOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig c = load_with_overrides(o);
    if (!o.quiet) out << o.config_path.string() << ": ok (" << c.checks.size() << " checks)\n";
    return kExitPass;
  } catch (const ConfigError& e) {
    report_config_error(o, e, err);
    return kExitConfigError;
  }
}

int command_simulate(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_with_overrides(o);
  } catch (const ConfigError& e) {
    report_config_error(o, e, err);
    return kExitConfigError;
  }
  try {
    std::filesystem::create_directories(o.out_dir);
    const Experiment e = realize(c);
    std::vector<ScenarioPaths> paths;
    for (const ScenarioData& d : e.scenarios) {
      paths.emplace_back(d.x.coordinates().begin(), d.x.coordinates().end());
    }
    std::ostringstream s;
    write_paths_csv(s, paths);
    write_text(o.out_dir / "paths.csv", s.str());
    if (!o.quiet) out << "wrote " << paths.size() << " scenarios to " << (o.out_dir / "paths.csv").string() << '\n';
    return kExitPass;
  } catch (const std::exception& e) {
    err << "simulate failed: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}

void command_list_checks(std::ostream& out) {
  for (const CheckInfo& c : check_registry()) {
    out << std::left << std::setw(22) << c.name << ' ' << c.description << '\n';
  }
}

}  // namespace cylint::cli
