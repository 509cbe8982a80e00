#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oulab {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::string out_dir;  // empty = current directory; reports/CSVs land here
  std::optional<std::uint64_t> seed_override;
  std::optional<long> paths_override;
  std::optional<int> resolution_override;
  std::string task_filter;  // empty = all; otherwise run only tasks of this type
  bool write_files = true;
};

struct RunResult {
  std::string report_json;  // the full report document
  bool all_passed = false;
  int exit_code = 0;  // 0 pass, 1 task failure or failed verdict
  std::string report_path;
  std::string csv_path;
};

/// Executes a scenario config (JSON text). Throws ConfigInvalid on malformed
/// configs (CLI exit code 2); task-level failures are captured in the report
/// and reflected by exit_code = 1.
RunResult run_scenario_json(const std::string& config_text, const RunOptions& options = {});

/// Loads the config from a file path or, when the argument names a bundled
/// scenario, from the embedded catalogue.
RunResult run_scenario(const std::string& path_or_name, const RunOptions& options = {});

std::vector<std::string> bundled_scenario_names();

/// Returns the embedded config text, or nullptr when the name is unknown.
const char* bundled_scenario(const std::string& name);

}  // namespace oulab
