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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qscissors/dynamics.hpp"
#include "qscissors/entanglement.hpp"
#include "qscissors/fock.hpp"
#include "qscissors/model.hpp"

namespace qscissors {

inline constexpr double kDefaultDeathThreshold = 1e-4;

struct Peak {
  double time;
  double value;
};

struct DeathReport {
  /// Start of the final sub-threshold stretch, in 1/chi units; empty when
  /// the series is still above threshold at its last sample.
  std::optional<double> tau_d_chi;
  double threshold = kDefaultDeathThreshold;
  /// Runs above threshold that start after the first sub-threshold run.
  int n_rebirths = 0;
  /// Sample values of the last and last-but-one interior maxima (0 if absent).
  double max_last = 0.0;
  double max_penultimate = 0.0;
  /// Every interior maximum at or above threshold, raw sample values.
  std::vector<Peak> maxima;
};

namespace detail {

inline void check_series(const NegativitySeries& s) {
  if (s.empty()) throw std::invalid_argument("negativity series is empty");
  if (s.negativity.size() != s.size() || s.trunc_trace.size() != s.size()) {
    throw std::invalid_argument("negativity series columns differ in length");
  }
}

inline bool is_interior_max(const std::vector<double>& y, std::size_t i) {
  return y[i] > y[i - 1] && y[i] > y[i + 1];
}

}  // namespace detail

/// Total disentanglement time. With `require_hold` this is the earliest
/// sample after which the negativity stays below threshold to the end of
/// the series (the last death, surviving all rebirths); without it, the
/// first sub-threshold sample.
inline DeathReport detect_death_time(const NegativitySeries& series,
                                     double threshold = kDefaultDeathThreshold,
                                     bool require_hold = true) {
  detail::check_series(series);
  if (!(threshold > 0.0)) throw std::invalid_argument("detect_death_time: threshold must be > 0");
  const auto& y = series.negativity;
  const std::size_t n = y.size();

  DeathReport report;
  report.threshold = threshold;

  if (require_hold) {
    std::optional<std::size_t> last_above;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] >= threshold) last_above = i;
    }
    if (!last_above) {
      report.tau_d_chi = series.times_chi.front();
    } else if (*last_above + 1 < n) {
      report.tau_d_chi = series.times_chi[*last_above + 1];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] < threshold) {
        report.tau_d_chi = series.times_chi[i];
        break;
      }
    }
  }

  bool seen_death = false;
  bool above = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool now_above = y[i] >= threshold;
    if (!now_above) seen_death = true;
    if (now_above && !above && seen_death) ++report.n_rebirths;
    above = now_above;
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (y[i] >= threshold && detail::is_interior_max(y, i)) {
      report.maxima.push_back({series.times_chi[i], y[i]});
    }
  }
  if (!report.maxima.empty()) report.max_last = report.maxima.back().value;
  if (report.maxima.size() >= 2) report.max_penultimate = report.maxima[report.maxima.size() - 2].value;
  return report;
}

/// Strict interior maxima at or above threshold, refined by a parabola
/// through the three samples around each. Assumes uniform spacing.
inline std::vector<Peak> find_negativity_maxima(const NegativitySeries& series,
                                                double threshold = kDefaultDeathThreshold) {
  detail::check_series(series);
  std::vector<Peak> peaks;
  const auto& y = series.negativity;
  const auto& t = series.times_chi;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] < threshold || !detail::is_interior_max(y, i)) continue;
    const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
    const double offset = 0.5 * (y[i - 1] - y[i + 1]) / curvature;  // in samples, |offset| < 1/2
    const double spacing = 0.5 * (t[i + 1] - t[i - 1]);
    peaks.push_back({t[i] + offset * spacing, y[i] - 0.25 * (y[i - 1] - y[i + 1]) * offset});
  }
  return peaks;
}

enum class InitialState { B1, B2, B3, vacuum };

inline TwoModeState make_initial_state(InitialState kind, const ModeDims& dims) {
  switch (kind) {
    case InitialState::B1: return bell_state(BellKind::B1, dims);
    case InitialState::B2: return bell_state(BellKind::B2, dims);
    case InitialState::B3: return bell_state(BellKind::B3, dims);
    case InitialState::vacuum: return TwoModeState::fock(dims, 0, 0);
  }
  throw std::invalid_argument("unknown initial state");
}

struct SimulationOptions {
  ModeDims dims = ModeDims::defaults();
  IntegratorOptions integrator;
  InitialState initial = InitialState::B3;
  bool renormalize_trunc = false;
  bool record_populations = false;
};

struct SimulationResult {
  NegativitySeries series;
  EvolutionRecord record;
};

/// Evolves the master equation and samples negativity and Tr rho_trunc.
inline SimulationResult simulate_negativity(const SystemParams& params,
                                            const SimulationOptions& opts) {
  const ModelOperators model = build_model(params, opts.dims);
  const DensityMatrix rho0(make_initial_state(opts.initial, opts.dims));
  SimulationResult result;
  const double chi = params.chi_a;
  const ModeDims dims = opts.dims;
  auto observer = [&](double t, const ComplexMatrix& rho) {
    const TruncatedState trunc = truncate_qutrit_qubit(dims, rho);
    result.series.push_back(t * chi, negativity(trunc, opts.renormalize_trunc), trunc.trace());
    if (opts.record_populations) result.series.populations.push_back(trunc.populations());
  };
  IntegratorOptions integrator = opts.integrator;
  integrator.keep_states = false;
  result.record = evolve_master(model, rho0, integrator, observer);
  return result;
}

/// Runs `task(i)` for i in [0, count) on at most `workers` threads.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& task) {
  workers = std::max(1u, std::min<unsigned>(workers, unsigned(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct SweepOptions {
  SimulationOptions simulation;
  double threshold = kDefaultDeathThreshold;
  bool require_hold = true;
  unsigned workers = default_workers();
  bool keep_series = false;
};

struct SweepTable {
  std::string axis_name;  // "phi" or "N_a"
  std::vector<double> axis_values;
  std::vector<DeathReport> reports;
  /// "ok", "undetermined" or "error: <message>" per axis value.
  std::vector<std::string> status;
  SystemParams params_used;
  std::vector<NegativitySeries> series;  // only with keep_series
  double max_trace_drift = 0.0;
  double max_hermiticity_drift = 0.0;
};

namespace detail {

inline SweepTable run_sweep(const std::string& axis, const std::vector<double>& values,
                            const SystemParams& base, const SweepOptions& opts,
                            const std::function<void(SystemParams&, double)>& set_axis) {
  SweepTable table;
  table.axis_name = axis;
  table.axis_values = values;
  table.params_used = base;
  const std::size_t n = values.size();
  table.reports.resize(n);
  table.status.resize(n);
  table.series.resize(opts.keep_series ? n : 0);
  std::vector<double> trace_drift(n, 0.0), herm_drift(n, 0.0);

  parallel_for(n, opts.workers, [&](std::size_t i) {
    try {
      SystemParams p = base;
      set_axis(p, values[i]);
      SimulationResult sim = simulate_negativity(p, opts.simulation);
      table.reports[i] = detect_death_time(sim.series, opts.threshold, opts.require_hold);
      table.status[i] = table.reports[i].tau_d_chi ? "ok" : "undetermined";
      trace_drift[i] = sim.record.max_trace_drift();
      herm_drift[i] = sim.record.max_hermiticity_drift();
      if (opts.keep_series) table.series[i] = std::move(sim.series);
    } catch (const std::exception& e) {
      table.reports[i].threshold = opts.threshold;
      table.status[i] = std::string("error: ") + e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    table.max_trace_drift = std::max(table.max_trace_drift, trace_drift[i]);
    table.max_hermiticity_drift = std::max(table.max_hermiticity_drift, herm_drift[i]);
  }
  return table;
}

}  // namespace detail

/// One |B_3> evolution and death analysis per squeezing phase.
inline SweepTable sweep_phase(const SystemParams& params_template,
                              const std::vector<double>& phi_values, const SweepOptions& opts) {
  for (double phi : phi_values) {
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
      throw std::invalid_argument("sweep_phase: phi values must lie in [0, 2pi)");
    }
  }
  return detail::run_sweep("phi", phi_values, params_template, opts,
                           [](SystemParams& p, double v) { p.phi = v; });
}

/// Same over the mode-a squeezing strength at fixed phase.
inline SweepTable sweep_squeezing(const SystemParams& params_template,
                                  const std::vector<double>& na_values, double phi,
                                  const SweepOptions& opts) {
  for (double na : na_values) {
    if (!(na >= 0.0)) throw std::invalid_argument("sweep_squeezing: N_a values must be >= 0");
  }
  SystemParams base = params_template;
  base.phi = phi;
  return detail::run_sweep("N_a", na_values, base, opts,
                           [](SystemParams& p, double v) { p.N_a = v; });
}

/// Uniform grid k * 2pi / points, k = 0..points-1.
inline std::vector<double> phase_grid(int points) {
  if (points < 1) throw std::invalid_argument("phase_grid: need at least one point");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) grid[k] = 2.0 * std::numbers::pi * k / points;
  return grid;
}

struct ConvergenceReport {
  ModeDims base_dims;
  ModeDims extended_dims;
  double sup_difference = 0.0;
  double tolerance = 1e-3;
  bool pass = false;
  NegativitySeries base;
  NegativitySeries extended;
};

/// Repeats a run with two more Fock levels per mode and compares the
/// negativity series sample by sample.
inline ConvergenceReport cutoff_convergence(const SystemParams& params, const ModeDims& base_dims,
                                            const SimulationOptions& opts,
                                            double tolerance = 1e-3, unsigned workers = 1) {
  ConvergenceReport report{base_dims, ModeDims(base_dims.levels_a() + 2, base_dims.levels_b() + 2)};
  report.tolerance = tolerance;
  SimulationOptions base_opts = opts;
  base_opts.dims = report.base_dims;
  SimulationOptions ext_opts = opts;
  ext_opts.dims = report.extended_dims;
  // The default step depends on the cutoff; samples still coincide.
  std::exception_ptr failures[2];
  parallel_for(2, workers, [&](std::size_t i) {
    try {
      if (i == 0) {
        report.base = simulate_negativity(params, base_opts).series;
      } else {
        report.extended = simulate_negativity(params, ext_opts).series;
      }
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  const std::size_t n = std::min(report.base.size(), report.extended.size());
  for (std::size_t i = 0; i < n; ++i) {
    report.sup_difference = std::max(
        report.sup_difference, std::abs(report.base.negativity[i] - report.extended.negativity[i]));
  }
  report.pass = report.sup_difference < tolerance;
  return report;
}

}  // namespace qscissors
