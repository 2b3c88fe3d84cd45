#pragma once

#include <string>
#include <vector>

#include "cbx/json_io.hpp"

namespace cbx {

/// One probe request inside a scenario; `expect` makes the run a regression
/// check (exit status reflects matches).
struct ProbeSpec {
  std::string kind;        // downward | upward | tightness | attainment | escape |
                           // factorization | lebesgue | fatou
  std::string functional;  // name of a functional entry (where applicable)
  json params;             // probe-specific knobs (sequence, f, m, table, ...)
  std::string expect;      // expected verdict ("" = informational only)
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
  std::vector<int> levels{4, 8, 16, 32, 64};
  std::vector<json> functionals;  // named functional specs
  std::vector<ProbeSpec> probes;
};

/// Parses and validates a scenario config; throws std::invalid_argument with
/// a diagnostic on schema violations (unknown kinds, missing references).
ScenarioConfig scenario_from_json(const json& j);

/// Canned scenario configs: entropic-vs-sup, envelope-convergence, escape,
/// factorization, lebesgue.
json canned_scenario(const std::string& name);
std::vector<std::string> canned_scenario_names();

struct ScenarioOutcome {
  json verdicts;  // deterministic given (config, seed)
  bool all_match = true;
  int exit_code = 0;  // 0 ok, 2 expectation mismatch
  std::vector<std::pair<std::string, std::string>> csv_files;  // name -> content
  std::vector<std::string> mismatches;
};

ScenarioOutcome run_scenario(const ScenarioConfig& config);

/// Writes verdicts.json, the CSV trajectory files, and metadata.json (the
/// only file carrying a timestamp) into out_dir.
void write_scenario_outputs(const ScenarioOutcome& outcome, const std::string& out_dir);

}  // namespace cbx
