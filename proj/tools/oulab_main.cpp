#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oulab/errors.hpp"
#include "oulab/harness.hpp"

namespace {

void add_common_options(CLI::App* cmd, std::string& config, oulab::RunOptions& options,
                        std::uint64_t& seed, long& paths, int& resolution) {
  cmd->add_option("config", config, "Scenario config file or bundled scenario name")->required();
  cmd->add_option("--out-dir", options.out_dir, "Directory for report.json / sweep.csv");
  cmd->add_option("--seed", seed, "Override the scenario seed");
  cmd->add_option("--paths", paths, "Override the Monte Carlo path count");
  cmd->add_option("--resolution", resolution, "Override grid resolutions");
}

int execute(const std::string& config, oulab::RunOptions options, std::uint64_t seed, long paths,
            int resolution) {
  if (seed != 0) options.seed_override = seed;
  if (paths != 0) options.paths_override = paths;
  if (resolution != 0) options.resolution_override = resolution;
  try {
    const oulab::RunResult result = oulab::run_scenario(config, options);
    if (!result.report_path.empty()) {
      std::cout << "report: " << result.report_path << "\n";
    }
    if (!result.csv_path.empty()) {
      std::cout << "csv: " << result.csv_path << "\n";
    }
    std::cout << (result.all_passed ? "PASS" : "FAIL") << "\n";
    return result.exit_code;
  } catch (const oulab::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oulab: Ornstein-Uhlenbeck Dirichlet problems at desk scale"};
  app.require_subcommand(1);

  std::string config;
  oulab::RunOptions options;
  std::uint64_t seed = 0;
  long paths = 0;
  int resolution = 0;

  auto* run = app.add_subcommand("run", "Run every task in a scenario");
  add_common_options(run, config, options, seed, paths, resolution);

  auto* sweep = app.add_subcommand("sweep", "Run only the sweep tasks (writes sweep.csv)");
  add_common_options(sweep, config, options, seed, paths, resolution);

  auto* crosscheck = app.add_subcommand("crosscheck", "Run only the crosscheck tasks");
  add_common_options(crosscheck, config, options, seed, paths, resolution);

  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& name : oulab::bundled_scenario_names()) std::cout << name << "\n";
    return 0;
  }
  if (sweep->parsed()) options.task_filter = "sweep";
  if (crosscheck->parsed()) options.task_filter = "crosscheck";
  return execute(config, options, seed, paths, resolution);
}
