// SPDX-License-Identifier: Apache-2.0
//
// Named batch scenarios: each one executes a fixed set of checks against
// the analytic oracles and emits curve CSVs plus JSON reports. The
// acceptance-criterion evaluators live here so the acceptance binary and
// the CLI exercise the exact same code paths.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qdyn {

struct CriterionCheck {
  std::string name;
  double value = 0.0;      // measured error / residual / ratio
  double tolerance = 0.0;  // pinned bound
  bool pass = false;
  std::string detail;      // free-form context (parameters, reported weights)
};

struct ScenarioResult {
  std::string scenario;
  std::vector<CriterionCheck> checks;
  std::vector<std::string> artifact_files;
  double wall_seconds = 0.0;
  bool all_pass() const;
};

const std::vector<std::string>& scenario_names();
std::string scenario_description(const std::string& name);
// Parameter defaults for one scenario, as a JSON object text.
std::string scenario_defaults_json(const std::string& name);
// Catalog [{name, description, defaults}] as JSON text.
std::string scenario_catalog_json();

// Field-level diagnostics; empty means valid. Never executes numerics.
std::vector<std::string> validate_config_text(const std::string& config_json);

// Runs the scenario named in the config. Artifacts and report.json are
// written into out_dir when nonempty; workers > 0 overrides the config.
ScenarioResult run_scenario_text(const std::string& config_json,
                                 const std::string& out_dir, int workers);

// RunReport JSON (also written as report.json by run_scenario_text).
std::string run_report_json(const ScenarioResult& result,
                            const std::string& config_json);

// Acceptance criterion k in [1,11] with the pinned parameters; returns the
// individual checks. Shared by the acceptance binary and the scenarios.
std::vector<CriterionCheck> evaluate_criterion(int k, int workers = 1);

// FNV-1a 64-bit hash of the raw config bytes, for regression tracking.
std::uint64_t fnv64(const std::string& bytes);

}  // namespace qdyn
