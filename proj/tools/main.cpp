// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace cellperm::cli;
  CLI::App app{"cellperm: periodic cell problems and permeability of two-fluid media"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> settings;
  std::string kind, levels, z, s, run;
  app.add_option("-c,--config", config_path, "Config file (bracketed sections, key = value)");
  app.add_option("--set", settings, "Override one setting, e.g. --set run.mu1=2");
  app.add_option("--case", kind, "solid, bubble or two_fluid");
  app.add_option("--levels", levels, "Refinement levels, e.g. 1-5 or 3,4");
  app.add_option("--z", z, "Viscosity ratios, e.g. \"1e4; 1e-4; 1,1\"");
  app.add_option("--s", s, "Contrast values for the series command");
  app.add_option("--run-id", run, "Run to export (see manifest.json)");

  for (const std::string& name : command_names()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) apply_setting(cfg, key, v);
    };
    set("run.case", kind);
    set("run.levels", levels);
    set("run.z", z);
    set("spectral.s", s);
    set("export.run_id", run);
    for (const std::string& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(kv, "expected key=value");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.geometry.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
