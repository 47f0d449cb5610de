// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the shared library exclusively through
// the C interface in qdyn/qdyn.h; configs are read here and passed through
// as JSON text.

#include "qdyn/qdyn.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace {

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { qdyn_string_destroy(s); }
};

int read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "error: cannot read config file '%s'\n", path.c_str());
    return 2;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return 0;
}

int report_api_error(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, qdyn_last_error());
  return 2;
}

int cmd_list() {
  StringGuard catalog;
  if (qdyn_list_scenarios(&catalog.s) != QDYN_OK)
    return report_api_error("list failed");
  nlohmann::json rows = nlohmann::json::parse(catalog.s);
  size_t width = 0;
  for (const auto& row : rows)
    width = std::max(width, row.at("name").get<std::string>().size());
  for (const auto& row : rows)
    std::printf("%-*s  %s\n", int(width), row.at("name").get<std::string>().c_str(),
                row.at("description").get<std::string>().c_str());
  return 0;
}

int cmd_validate(const std::string& config_path) {
  std::string config;
  if (int rc = read_file(config_path, config)) return rc;
  StringGuard diags;
  int valid = 0;
  if (qdyn_validate_config(config.c_str(), &diags.s, &valid) != QDYN_OK)
    return report_api_error("validate failed");
  nlohmann::json rows = nlohmann::json::parse(diags.s);
  for (const auto& d : rows)
    std::printf("invalid: %s\n", d.get<std::string>().c_str());
  if (valid) {
    std::printf("config ok: %s\n", config_path.c_str());
    return 0;
  }
  return 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers) {
  std::string config;
  if (int rc = read_file(config_path, config)) return rc;
  StringGuard report;
  int all_pass = 0;
  if (qdyn_run_scenario(config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                        workers, &report.s, &all_pass) != QDYN_OK)
    return report_api_error("run failed");
  nlohmann::json r = nlohmann::json::parse(report.s);
  std::printf("scenario %s  (%s)\n", r.at("scenario").get<std::string>().c_str(),
              r.at("config_hash").get<std::string>().c_str());
  for (const auto& k : r.at("checks")) {
    std::printf("  [%s] %-38s value=%-12.5g tol=%-10.5g %s\n",
                k.at("pass").get<bool>() ? "PASS" : "FAIL",
                k.at("relation").get<std::string>().c_str(),
                k.at("residual").get<double>(), k.at("tolerance").get<double>(),
                k.at("params").get<std::string>().c_str());
  }
  std::printf("result: %s  wall=%.2fs", all_pass ? "PASS" : "FAIL",
              r.at("wall_seconds").get<double>());
  if (!out_dir.empty()) std::printf("  artifacts=%s", out_dir.c_str());
  std::printf("\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariant quantum dynamics toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qdyn_version()));

  app.add_subcommand("list", "List available scenarios");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "Check a config without running");
  validate->add_option("--config", validate_config, "Path to a scenario config JSON")
      ->required();

  std::string run_config, run_out;
  int workers = 1;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write artifacts");
  run->add_option("--config", run_config, "Path to a scenario config JSON")->required();
  run->add_option("--out", run_out, "Directory for CSV/JSON artifacts");
  run->add_option("--workers", workers, "Worker threads for trajectory scenarios");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) return cmd_list();
  if (app.got_subcommand("validate")) return cmd_validate(validate_config);
  return cmd_run(run_config, run_out, workers);
}
