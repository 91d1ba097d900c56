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

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qscissors/analysis.hpp"
#include "qscissors/dynamics.hpp"
#include "qscissors/model.hpp"

namespace qscissors {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { simulate, sweep_phase, sweep_na, fidelity, convergence };

/// Everything needed to reproduce one CLI run. Times ending in `_chi` are
/// in units of 1/chi_a; `step` is absolute.
struct RunConfig {
  SystemParams params;
  int levels_a = 10;
  int levels_b = 10;
  std::optional<double> step;
  double sample_interval_chi = 0.2;
  double t_max_chi = 2000.0;
  ErrorControl error_control = ErrorControl::fixed;
  double local_tolerance = 1e-9;
  InitialState initial_state = InitialState::B3;
  Scenario scenario = Scenario::simulate;
  std::string output_dir = "out";
  double death_threshold = kDefaultDeathThreshold;
  bool renormalize_trunc = false;
  bool populations = false;
  int phase_points = 16;
  std::vector<double> na_values{0.0, 0.5, 1.0, 2.0, 4.0};
  std::string preset = "default";

  ModeDims dims() const { return {levels_a, levels_b}; }

  IntegratorOptions integrator() const {
    IntegratorOptions opts;
    opts.step = step;
    opts.sample_interval = sample_interval_chi / params.chi_a;
    opts.t_max = t_max_chi / params.chi_a;
    opts.error_control = error_control;
    opts.local_tolerance = local_tolerance;
    return opts;
  }

  SimulationOptions simulation() const {
    SimulationOptions sim{dims()};
    sim.integrator = integrator();
    sim.initial = initial_state;
    sim.renormalize_trunc = renormalize_trunc;
    sim.record_populations = populations;
    return sim;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite real number, got '" + v + "'");
  }
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class E>
struct EnumName {
  E value;
  const char* name;
};

inline constexpr EnumName<Scenario> kScenarioNames[] = {
    {Scenario::simulate, "simulate"},
    {Scenario::sweep_phase, "sweep-phase"},
    {Scenario::sweep_na, "sweep-na"},
    {Scenario::fidelity, "fidelity"},
    {Scenario::convergence, "convergence"}};

inline constexpr EnumName<InitialState> kInitialNames[] = {{InitialState::B1, "B1"},
                                                           {InitialState::B2, "B2"},
                                                           {InitialState::B3, "B3"},
                                                           {InitialState::vacuum, "vacuum"}};

inline constexpr EnumName<ErrorControl> kErrorControlNames[] = {
    {ErrorControl::fixed, "fixed"}, {ErrorControl::step_doubling, "step_doubling"}};

template <class E, std::size_t N>
E parse_enum(const std::string& key, const std::string& v, const EnumName<E> (&names)[N]) {
  std::string allowed;
  for (const auto& n : names) {
    if (v == n.name) return n.value;
    allowed += allowed.empty() ? n.name : std::string(", ") + n.name;
  }
  throw ConfigError(key + ": unknown value '" + v + "' (expected one of " + allowed + ")");
}

template <class E, std::size_t N>
const char* enum_name(E v, const EnumName<E> (&names)[N]) {
  for (const auto& n : names) {
    if (n.value == v) return n.name;
  }
  return "?";
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"chi_a", [](RunConfig& c, const std::string& v) { c.params.chi_a = parse_real("chi_a", v); }},
      {"chi_b", [](RunConfig& c, const std::string& v) { c.params.chi_b = parse_real("chi_b", v); }},
      {"epsilon",
       [](RunConfig& c, const std::string& v) { c.params.epsilon = parse_real("epsilon", v); }},
      {"alpha",
       [](RunConfig& c, const std::string& v) {
         c.params.alpha = {parse_real("alpha", v), c.params.alpha.imag()};
       }},
      {"alpha_imag",
       [](RunConfig& c, const std::string& v) {
         c.params.alpha = {c.params.alpha.real(), parse_real("alpha_imag", v)};
       }},
      {"gamma_a",
       [](RunConfig& c, const std::string& v) { c.params.gamma_a = parse_real("gamma_a", v); }},
      {"gamma_b",
       [](RunConfig& c, const std::string& v) { c.params.gamma_b = parse_real("gamma_b", v); }},
      {"N_a", [](RunConfig& c, const std::string& v) { c.params.N_a = parse_real("N_a", v); }},
      {"N_b", [](RunConfig& c, const std::string& v) { c.params.N_b = parse_real("N_b", v); }},
      {"phi", [](RunConfig& c, const std::string& v) { c.params.phi = parse_real("phi", v); }},
      {"thermal_only",
       [](RunConfig& c, const std::string& v) {
         c.params.thermal_only = parse_bool("thermal_only", v);
       }},
      {"levels_a",
       [](RunConfig& c, const std::string& v) { c.levels_a = parse_int("levels_a", v); }},
      {"levels_b",
       [](RunConfig& c, const std::string& v) { c.levels_b = parse_int("levels_b", v); }},
      {"step",
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") {
           c.step.reset();
         } else {
           c.step = parse_real("step", v);
         }
       }},
      {"sample_interval_chi",
       [](RunConfig& c, const std::string& v) {
         c.sample_interval_chi = parse_real("sample_interval_chi", v);
       }},
      {"t_max_chi",
       [](RunConfig& c, const std::string& v) { c.t_max_chi = parse_real("t_max_chi", v); }},
      {"error_control",
       [](RunConfig& c, const std::string& v) {
         c.error_control = parse_enum("error_control", v, kErrorControlNames);
       }},
      {"local_tolerance",
       [](RunConfig& c, const std::string& v) {
         c.local_tolerance = parse_real("local_tolerance", v);
       }},
      {"initial_state",
       [](RunConfig& c, const std::string& v) {
         c.initial_state = parse_enum("initial_state", v, kInitialNames);
       }},
      {"scenario",
       [](RunConfig& c, const std::string& v) {
         c.scenario = parse_enum("scenario", v, kScenarioNames);
       }},
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"death_threshold",
       [](RunConfig& c, const std::string& v) {
         c.death_threshold = parse_real("death_threshold", v);
       }},
      {"renormalize_trunc",
       [](RunConfig& c, const std::string& v) {
         c.renormalize_trunc = parse_bool("renormalize_trunc", v);
       }},
      {"populations",
       [](RunConfig& c, const std::string& v) { c.populations = parse_bool("populations", v); }},
      {"phase_points",
       [](RunConfig& c, const std::string& v) { c.phase_points = parse_int("phase_points", v); }},
      {"na_values",
       [](RunConfig& c, const std::string& v) { c.na_values = parse_real_list("na_values", v); }},
      {"preset", [](RunConfig& c, const std::string& v) { c.preset = v; }},
  };
  return table;
}

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                          const std::string& where) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace detail

/// Preset names accepted by preset_config().
inline std::vector<std::string> preset_names() {
  return {"default", "fig1",  "fig2",  "fig2-pi", "fig3",  "fig3-thermal", "fig3-undriven",
          "fig4a",   "fig4b", "fig4c", "fig5",    "fig6",  "fig7",         "convergence"};
}

/// Parameter sets for the reference scenarios. Horizons are chosen to
/// cover the final disentanglement with margin.
inline RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  auto phase_sweep = [&c](double alpha, double na, double t_max_chi) {
    c.scenario = Scenario::sweep_phase;
    c.params.alpha = alpha;
    c.params.N_a = na;
    c.t_max_chi = t_max_chi;
  };
  if (name == "default") return c;
  if (name == "fig1") {
    c.scenario = Scenario::fidelity;
    c.params.gamma_a = c.params.gamma_b = 0.0;
    c.params.N_a = 0.0;
    c.params.alpha = 0.1;
    c.t_max_chi = 1000.0;
  } else if (name == "fig2" || name == "fig2-pi") {
    c.scenario = Scenario::sweep_na;
    c.params.alpha = 0.01;
    c.params.phi = name == "fig2" ? 0.0 : std::numbers::pi;
    c.t_max_chi = 5000.0;
  } else if (name == "fig3" || name == "fig3-thermal" || name == "fig3-undriven") {
    c.params.epsilon = 0.0;
    c.params.alpha = name == "fig3-undriven" ? 0.0 : 0.01;
    c.params.thermal_only = name == "fig3-thermal";
    c.t_max_chi = 1500.0;
  } else if (name == "fig4a") {
    phase_sweep(0.01, 2.0, 2000.0);
  } else if (name == "fig4b" || name == "fig5") {
    phase_sweep(0.1, 2.0, 2000.0);
  } else if (name == "fig4c") {
    phase_sweep(0.2, 2.0, 2000.0);
  } else if (name == "fig6") {
    phase_sweep(0.2, 1.0, 3000.0);
  } else if (name == "fig7") {
    c.params.alpha = 0.1;
    c.t_max_chi = 2000.0;
  } else if (name == "convergence") {
    c.scenario = Scenario::convergence;
    c.params.alpha = 0.1;
    c.t_max_chi = 2000.0;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return c;
}

/// Range checks; messages name the offending key.
inline void validate_config(const RunConfig& c) {
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.levels_a < 4) throw ConfigError("levels_a: must be >= 4");
  if (c.levels_b < 4) throw ConfigError("levels_b: must be >= 4");
  if (c.step && !(*c.step > 0.0)) throw ConfigError("step: must be > 0 or 'auto'");
  if (!(c.sample_interval_chi > 0.0)) throw ConfigError("sample_interval_chi: must be > 0");
  if (c.t_max_chi < c.sample_interval_chi) {
    throw ConfigError("t_max_chi: must be >= sample_interval_chi");
  }
  if (c.step && *c.step > c.sample_interval_chi / c.params.chi_a) {
    throw ConfigError("step: must not exceed the sample interval");
  }
  if (!(c.local_tolerance > 0.0)) throw ConfigError("local_tolerance: must be > 0");
  if (!(c.death_threshold > 0.0)) throw ConfigError("death_threshold: must be > 0");
  if (c.phase_points < 1) throw ConfigError("phase_points: must be >= 1");
  for (double v : c.na_values) {
    if (v < 0.0) throw ConfigError("na_values: entries must be >= 0");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  if (c.scenario == Scenario::fidelity && (c.params.gamma_a != 0.0 || c.params.gamma_b != 0.0)) {
    throw ConfigError("gamma_a/gamma_b: the fidelity scenario is lossless and needs both = 0");
  }
}

/// Parses flat `key = value` text (`#` starts a comment), then applies
/// `overrides` in order. `base` supplies values for missing keys.
inline RunConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {},
                              RunConfig base = {}) {
  RunConfig cfg = std::move(base);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string content = detail::trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(content).substr(0, eq));
    const std::string value = detail::trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    detail::apply_setting(cfg, key, value, where);
  }
  for (const auto& [key, value] : overrides) {
    detail::apply_setting(cfg, key, value, "override '" + key + "'");
  }
  validate_config(cfg);
  return cfg;
}

/// `key = value` lines for every setting; parse_config() reproduces `c`.
inline std::string serialize_config(const RunConfig& c) {
  using detail::format_real;
  std::ostringstream out;
  auto kv = [&out](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  kv("preset", c.preset);
  kv("scenario", detail::enum_name(c.scenario, detail::kScenarioNames));
  kv("chi_a", format_real(c.params.chi_a));
  kv("chi_b", format_real(c.params.chi_b));
  kv("epsilon", format_real(c.params.epsilon));
  kv("alpha", format_real(c.params.alpha.real()));
  kv("alpha_imag", format_real(c.params.alpha.imag()));
  kv("gamma_a", format_real(c.params.gamma_a));
  kv("gamma_b", format_real(c.params.gamma_b));
  kv("N_a", format_real(c.params.N_a));
  kv("N_b", format_real(c.params.N_b));
  kv("phi", format_real(c.params.phi));
  kv("thermal_only", b(c.params.thermal_only));
  kv("levels_a", std::to_string(c.levels_a));
  kv("levels_b", std::to_string(c.levels_b));
  kv("step", c.step ? format_real(*c.step) : "auto");
  kv("sample_interval_chi", format_real(c.sample_interval_chi));
  kv("t_max_chi", format_real(c.t_max_chi));
  kv("error_control", detail::enum_name(c.error_control, detail::kErrorControlNames));
  kv("local_tolerance", format_real(c.local_tolerance));
  kv("initial_state", detail::enum_name(c.initial_state, detail::kInitialNames));
  kv("output_dir", c.output_dir);
  kv("death_threshold", format_real(c.death_threshold));
  kv("renormalize_trunc", b(c.renormalize_trunc));
  kv("populations", b(c.populations));
  kv("phase_points", std::to_string(c.phase_points));
  std::string list;
  for (double v : c.na_values) list += (list.empty() ? "" : ",") + format_real(v);
  kv("na_values", list);
  return out.str();
}

}  // namespace qscissors
