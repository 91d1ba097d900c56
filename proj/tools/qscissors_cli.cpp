// Copyright 2026 The qscissors Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: resolves preset, config file and overrides into a
// RunConfig and executes it.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qscissors/qscissors.hpp"

int main(int argc, char** argv) {
  using namespace qscissors;

  CLI::App app{"Entanglement decay of a driven Kerr coupler in a squeezed vacuum bath"};
  std::string config_path;
  std::string preset = "default";
  std::string out_dir;
  unsigned workers = default_workers();
  std::vector<std::string> sets;
  std::string threshold;
  bool renormalize = false;
  bool thermal_only = false;
  bool list_presets = false;

  app.add_option("--config", config_path, "Flat key = value configuration file");
  app.add_option("--preset", preset, "Reference scenario preset (see --list-presets)");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "Override one setting, key=value (repeatable)");
  app.add_option("--threshold", threshold, "Death threshold on the negativity");
  app.add_flag("--renormalize-trunc", renormalize,
               "Divide the truncated state by its trace before computing negativity");
  app.add_flag("--thermal-only", thermal_only, "Thermal bath with the same N (M = 0)");
  app.add_flag("--list-presets", list_presets, "Print preset names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (list_presets) {
    for (const auto& name : preset_names()) std::cout << name << '\n';
    return kExitOk;
  }

  RunConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read config file " << config_path << '\n';
        return kExitIo;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!out_dir.empty()) overrides.emplace_back("output_dir", out_dir);
    if (!threshold.empty()) overrides.emplace_back("death_threshold", threshold);
    if (renormalize) overrides.emplace_back("renormalize_trunc", "true");
    if (thermal_only) overrides.emplace_back("thermal_only", "true");
    cfg = parse_config(text, overrides, preset_config(preset));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const RunSummary summary = run(cfg, workers, &std::cerr);
  if (summary.exit_code == kExitOk) {
    std::cerr << "wrote";
    for (const auto& f : summary.files) std::cerr << ' ' << cfg.output_dir << '/' << f;
    std::cerr << '\n';
  }
  return summary.exit_code;
}
