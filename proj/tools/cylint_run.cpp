// cylint-run: config-driven experiment runner.

#include <iostream>

#include <CLI11.hpp>

#include "cylint/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace cylint::cli;
  CLI::App app{"Stochastic integration checks against sequences of semimartingales"};
  app.require_subcommand(1);

  RunOptions opt;
  std::uint64_t seed = 0;
  std::size_t scenarios = 0;
  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", opt.config_path, "experiment config (YAML)")->required();
    auto* out = sub->add_option("--out", opt.out_dir, "output directory");
    if (needs_out) out->required();
    sub->add_option("--seed", seed, "override ensemble.master_seed");
    sub->add_option("--scenarios", scenarios, "override ensemble.scenarios");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  };

  CLI::App* run = app.add_subcommand("run", "run the configured checks and write reports");
  add_common(run, true);
  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
  add_common(validate, false);
  CLI::App* simulate = app.add_subcommand("simulate", "write the generated integrator paths");
  add_common(simulate, true);
  CLI::App* list = app.add_subcommand("list-checks", "list the available checks");
  CLI::App* version = app.add_subcommand("version", "print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }
  for (CLI::App* sub : {run, validate, simulate}) {
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--scenarios")) opt.scenarios = scenarios;
  }

  if (*list) {
    command_list_checks(std::cout);
    return kExitPass;
  }
  if (*version) {
    std::cout << "cylint " << kVersion << '\n';
    return kExitPass;
  }
  if (*validate) return command_validate(opt, std::cout, std::cerr);
  if (*simulate) return command_simulate(opt, std::cout, std::cerr);
  return command_run(opt, std::cout, std::cerr);
}
