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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qscissors/analysis.hpp"
#include "qscissors/config.hpp"
#include "qscissors/dynamics.hpp"
#include "qscissors/entanglement.hpp"

#ifndef QSCISSORS_VERSION
#define QSCISSORS_VERSION "0.0.0"
#endif

namespace qscissors {

using detail::format_real;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point text with 12 digits after the decimal point; "nan" for NaN.
inline std::string format_csv_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

struct RunSummary {
  int exit_code = kExitOk;
  std::vector<std::string> files;
  double max_trace_drift = 0.0;
  double max_hermiticity_drift = 0.0;
  std::vector<std::string> notes;  // extra manifest lines (key = value)
  std::string error;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& body,
                       RunSummary& summary) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
  summary.files.push_back(path.filename().string());
}

inline std::string series_csv(const NegativitySeries& s, bool populations) {
  std::ostringstream out;
  out << "t_chi,negativity,trunc_trace";
  if (populations) out << ",p_0_0,p_0_2,p_1_0,p_1_2,p_2_0,p_2_2";
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_csv_real(s.times_chi[i]) << ',' << format_csv_real(s.negativity[i]) << ','
        << format_csv_real(s.trunc_trace[i]);
    if (populations) {
      for (int k = 0; k < 6; ++k) out << ',' << format_csv_real(s.populations[i][k]);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string sweep_csv(const SweepTable& t) {
  std::ostringstream out;
  out << "axis_value,tau_d_chi,n_rebirths,max_last,max_penultimate,status\n";
  for (std::size_t i = 0; i < t.axis_values.size(); ++i) {
    const DeathReport& r = t.reports[i];
    const bool failed = t.status[i].rfind("error", 0) == 0;
    const double nan = std::nan("");
    std::string status = t.status[i];
    for (char& ch : status) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << format_csv_real(t.axis_values[i]) << ','
        << format_csv_real(r.tau_d_chi.value_or(nan)) << ','
        << (failed ? std::string("nan") : std::to_string(r.n_rebirths)) << ','
        << format_csv_real(failed ? nan : r.max_last) << ','
        << format_csv_real(failed ? nan : r.max_penultimate) << ',' << status << '\n';
  }
  return out.str();
}

inline void run_simulate(const RunConfig& cfg, const std::filesystem::path& dir,
                         RunSummary& summary) {
  const SimulationResult sim = simulate_negativity(cfg.params, cfg.simulation());
  summary.max_trace_drift = sim.record.max_trace_drift();
  summary.max_hermiticity_drift = sim.record.max_hermiticity_drift();
  summary.notes.push_back("step_used = " + format_real(sim.record.step));
  for (const auto& w : sim.record.warnings) summary.notes.push_back("warning = " + w);
  const DeathReport death = detect_death_time(sim.series, cfg.death_threshold);
  summary.notes.push_back("tau_d_chi = " +
                          (death.tau_d_chi ? format_real(*death.tau_d_chi) : "undetermined"));
  summary.notes.push_back("n_rebirths = " + std::to_string(death.n_rebirths));
  write_file(dir / "series.csv", series_csv(sim.series, cfg.populations), summary);
}

inline void run_fidelity(const RunConfig& cfg, const std::filesystem::path& dir,
                         RunSummary& summary) {
  const ModeDims dims = cfg.dims();
  const TwoModeOperator h = build_hamiltonian(cfg.params, dims);
  const TwoModeState psi0 = make_initial_state(cfg.initial_state, dims);
  std::ostringstream out;
  out << "t_chi,fidelity,norm_drift\n";
  double min_fidelity = 1.0;
  const double chi = cfg.params.chi_a;
  auto observer = [&](double t, const ComplexVector& psi) {
    const double norm = psi.norm();
    const double fidelity = truncation_fidelity(TwoModeState(dims, psi));
    min_fidelity = std::min(min_fidelity, fidelity);
    out << format_csv_real(t * chi) << ',' << format_csv_real(fidelity) << ','
        << format_csv_real(std::abs(norm - 1.0)) << '\n';
  };
  const PureEvolutionRecord rec = evolve_pure(h, psi0, cfg.integrator(), observer);
  double max_norm = 0.0;
  for (double d : rec.norm_drift) max_norm = std::max(max_norm, d);
  summary.notes.push_back("step_used = " + format_real(rec.step));
  summary.notes.push_back("max_norm_drift = " + format_real(max_norm));
  summary.notes.push_back("min_fidelity = " + format_real(min_fidelity));
  for (const auto& w : rec.warnings) summary.notes.push_back("warning = " + w);
  write_file(dir / "series.csv", out.str(), summary);
}

inline void run_sweep_scenario(const RunConfig& cfg, const std::filesystem::path& dir,
                               unsigned workers, RunSummary& summary) {
  SweepOptions opts;
  opts.simulation = cfg.simulation();
  opts.threshold = cfg.death_threshold;
  opts.workers = workers;
  const SweepTable table =
      cfg.scenario == Scenario::sweep_phase
          ? sweep_phase(cfg.params, phase_grid(cfg.phase_points), opts)
          : sweep_squeezing(cfg.params, cfg.na_values, cfg.params.phi, opts);
  summary.max_trace_drift = table.max_trace_drift;
  summary.max_hermiticity_drift = table.max_hermiticity_drift;
  write_file(dir / "sweep.csv", sweep_csv(table), summary);
  for (const auto& s : table.status) {
    if (s.rfind("error", 0) == 0) {
      summary.exit_code = kExitNumerical;
      summary.error = "one or more sweep points failed: " + s;
    }
  }
}

inline void run_convergence(const RunConfig& cfg, const std::filesystem::path& dir,
                            unsigned workers, RunSummary& summary) {
  const ConvergenceReport rep =
      cutoff_convergence(cfg.params, cfg.dims(), cfg.simulation(), 1e-3, workers);
  std::ostringstream out;
  out << "t_chi,negativity_base,negativity_extended,abs_difference\n";
  const std::size_t n = std::min(rep.base.size(), rep.extended.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << format_csv_real(rep.base.times_chi[i]) << ',' << format_csv_real(rep.base.negativity[i])
        << ',' << format_csv_real(rep.extended.negativity[i]) << ','
        << format_csv_real(std::abs(rep.base.negativity[i] - rep.extended.negativity[i])) << '\n';
  }
  summary.notes.push_back("extended_levels = " + std::to_string(rep.extended_dims.levels_a()) +
                          "x" + std::to_string(rep.extended_dims.levels_b()));
  summary.notes.push_back("sup_difference = " + format_real(rep.sup_difference));
  summary.notes.push_back(std::string("convergence = ") + (rep.pass ? "PASS" : "FAIL"));
  summary.notes.push_back("converged_cutoff = " +
                          (rep.pass ? std::to_string(rep.base_dims.levels_a()) + "x" +
                                          std::to_string(rep.base_dims.levels_b())
                                    : std::string("not established")));
  write_file(dir / "convergence.csv", out.str(), summary);
}

}  // namespace detail

/// Manifest: the resolved configuration (re-readable by parse_config)
/// followed by diagnostics as comments.
inline std::string manifest_text(const RunConfig& cfg, const RunSummary& summary,
                                 double wall_seconds) {
  std::ostringstream out;
  out << "# qscissors run manifest\n";
  out << "# version = " << QSCISSORS_VERSION << '\n';
  out << serialize_config(cfg);
  out << "# max_trace_drift = " << format_real(summary.max_trace_drift) << '\n';
  out << "# max_hermiticity_drift = " << format_real(summary.max_hermiticity_drift) << '\n';
  for (const auto& note : summary.notes) out << "# " << note << '\n';
  out << "# files = ";
  for (std::size_t i = 0; i < summary.files.size(); ++i) out << (i ? "," : "") << summary.files[i];
  out << '\n';
  if (!summary.error.empty()) out << "# error = " << summary.error << '\n';
  out << "# exit_code = " << summary.exit_code << '\n';
  out << "# wall_time_s = " << format_real(wall_seconds) << '\n';
  return out.str();
}

/// Executes the configured scenario and writes its CSV plus manifest.txt
/// into cfg.output_dir.
inline RunSummary run(const RunConfig& cfg, unsigned workers = default_workers(),
                      std::ostream* log = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  RunSummary summary;
  const std::filesystem::path dir(cfg.output_dir);
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    summary.exit_code = kExitConfig;
    summary.error = e.what();
    return summary;
  }
  try {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    switch (cfg.scenario) {
      case Scenario::simulate: detail::run_simulate(cfg, dir, summary); break;
      case Scenario::fidelity: detail::run_fidelity(cfg, dir, summary); break;
      case Scenario::sweep_phase:
      case Scenario::sweep_na: detail::run_sweep_scenario(cfg, dir, workers, summary); break;
      case Scenario::convergence: detail::run_convergence(cfg, dir, workers, summary); break;
    }
  } catch (const IoError& e) {
    summary.exit_code = kExitIo;
    summary.error = e.what();
    return summary;
  } catch (const NumericalError& e) {
    summary.exit_code = kExitNumerical;
    summary.error = e.what();
  } catch (const std::invalid_argument& e) {
    summary.exit_code = kExitConfig;
    summary.error = e.what();
  } catch (const std::exception& e) {
    summary.exit_code = kExitNumerical;
    summary.error = e.what();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    RunSummary copy = summary;
    copy.files.push_back("manifest.txt");
    detail::write_file(dir / "manifest.txt", manifest_text(cfg, copy, wall), summary);
  } catch (const IoError& e) {
    summary.exit_code = kExitIo;
    summary.error = e.what();
  }
  if (log) {
    for (const auto& note : summary.notes) *log << note << '\n';
    if (!summary.error.empty()) *log << "error: " << summary.error << '\n';
  }
  return summary;
}

}  // namespace qscissors
