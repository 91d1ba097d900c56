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
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qscissors/fock.hpp"
#include "qscissors/model.hpp"

namespace qscissors {

/// Integration failure: divergence or a step outside the RK4 stability region.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

enum class ErrorControl { fixed, step_doubling };

struct IntegratorOptions {
  /// Absolute time step; empty selects 0.5 / stiffness.
  std::optional<double> step;
  double sample_interval = 0.008;
  double t_max = 100.0;
  ErrorControl error_control = ErrorControl::fixed;
  double local_tolerance = 1e-9;
  /// Keep full density-matrix snapshots in the record.
  bool keep_states = false;

  void validate() const {
    if (step && !(*step > 0.0 && std::isfinite(*step))) {
      throw std::invalid_argument("IntegratorOptions.step must be positive");
    }
    if (!(sample_interval > 0.0 && std::isfinite(sample_interval))) {
      throw std::invalid_argument("IntegratorOptions.sample_interval must be positive");
    }
    if (!(t_max > 0.0 && std::isfinite(t_max))) {
      throw std::invalid_argument("IntegratorOptions.t_max must be positive");
    }
    if (step && *step > sample_interval * (1.0 + 1e-12)) {
      throw std::invalid_argument("IntegratorOptions: sample_interval must be >= step");
    }
    if (t_max < sample_interval * (1.0 - 1e-12)) {
      throw std::invalid_argument("IntegratorOptions: t_max must be >= sample_interval");
    }
    if (!(local_tolerance > 0.0)) {
      throw std::invalid_argument("IntegratorOptions.local_tolerance must be positive");
    }
  }
};

/// step * stiffness above this emits a warning; above kHardStabilityLimit it is an error.
inline constexpr double kSoftStabilityLimit = 1.0;
inline constexpr double kHardStabilityLimit = 2.5;
inline constexpr double kDefaultStepFactor = 0.5;

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;  // only with keep_states
  std::vector<double> trace_drift;
  std::vector<double> hermiticity_drift;
  double step = 0.0;
  long long steps_taken = 0;
  std::vector<std::string> warnings;

  double max_trace_drift() const {
    return trace_drift.empty() ? 0.0 : *std::max_element(trace_drift.begin(), trace_drift.end());
  }
  double max_hermiticity_drift() const {
    return hermiticity_drift.empty()
               ? 0.0
               : *std::max_element(hermiticity_drift.begin(), hermiticity_drift.end());
  }
};

struct PureEvolutionRecord {
  std::vector<double> times;
  std::vector<TwoModeState> states;
  std::vector<double> norm_drift;
  double step = 0.0;
  long long steps_taken = 0;
  std::vector<std::string> warnings;
};

/// Called at every sample with the absolute time and the re-Hermitized state.
using MasterObserver = std::function<void(double, const ComplexMatrix&)>;
using PureObserver = std::function<void(double, const ComplexVector&)>;

/// Spread of the Hamiltonian diagonal: the fastest coherent frequency.
inline double diagonal_gap(const TwoModeOperator& h) {
  auto it = h.diagonals().find(0);
  if (it == h.diagonals().end()) return 0.0;
  const Eigen::VectorXd re = it->second.real();
  return re.maxCoeff() - re.minCoeff();
}

/// Stability scale of the generator: the diagonal gap of H plus, per mode,
/// 2 gamma (2N + 1 + 2|M|)(L - 1), a bound on the dissipative rates of an
/// L-level truncation.
inline double stiffness(const ModelOperators& model) {
  double rate = 0.0;
  const ModeDims& dims = model.dims();
  for (Mode mode : {Mode::a, Mode::b}) {
    const ModeBath& bath = model.bath(mode);
    const double top = double(dims.levels(mode) - 1);
    rate += 2.0 * bath.gamma * (2.0 * bath.N + 1.0 + 2.0 * std::abs(bath.M)) * top;
  }
  return diagonal_gap(model.hamiltonian) + rate;
}

/// Generator of the squeezed-bath master equation,
///
///   drho/dt = -i[H, rho] + sum_j L_j(rho),
///   L_j = g(N+1) D[j] + gN D[j+] - g M* S[j+] - g M S[j],
///
/// with D[x] = 2 x rho x+ - x+x rho - rho x+x and S[x] = 2 x rho x - xx rho - rho xx.
/// The one-sided terms fold into a non-Hermitian K = H - iG,
/// G = g(N+1) j+j + gN jj+ - gM* j+j+ - gM jj (G is Hermitian), so that
///
///   drho/dt = -i(K rho - rho K+) + sum of sandwich terms x rho y+.
class MasterGenerator {
 public:
  explicit MasterGenerator(const ModelOperators& model)
      : dims_(model.dims()), effective_(model.hamiltonian), stiffness_(qscissors::stiffness(model)) {
    for (Mode mode : {Mode::a, Mode::b}) {
      const ModeBath& bath = model.bath(mode);
      if (bath.gamma == 0.0) continue;
      const TwoModeOperator j = annihilator(dims_, mode);
      const TwoModeOperator jd = j.adjoint();
      const double g = bath.gamma;
      const Complex gm = g * bath.M;
      const Complex gmc = std::conj(gm);

      TwoModeOperator damping = Complex{g * (bath.N + 1.0)} * (jd * j);
      if (bath.N != 0.0) damping += Complex{g * bath.N} * (j * jd);
      if (gm != Complex{}) {
        damping -= gmc * (jd * jd);
        damping -= gm * (j * j);
      }
      effective_ -= kI * damping;

      add_jump(j, j, 2.0 * g * (bath.N + 1.0), JumpKind::self_adjoint);
      if (bath.N != 0.0) add_jump(jd, jd, 2.0 * g * bath.N, JumpKind::self_adjoint);
      if (gm != Complex{}) {
        // j+ rho j+ and j rho j are adjoints of each other for Hermitian rho
        add_jump(jd, j, -2.0 * gmc, JumpKind::pair_leader);
        add_jump(j, jd, -2.0 * gm, JumpKind::pair_follower);
      }
    }
  }

  const ModeDims& dims() const { return dims_; }
  Index dim() const { return dims_.dim(); }
  double stiffness() const { return stiffness_; }
  const TwoModeOperator& effective_hamiltonian() const { return effective_; }

  /// out = L(rho); out is resized as needed.
  void apply(const ComplexMatrix& rho, ComplexMatrix& out) const {
    if (rho.rows() != dim() || rho.cols() != dim()) {
      throw std::invalid_argument("master_rhs: dimension mismatch");
    }
    out.setZero(dim(), dim());
    effective_.multiply_left_add(rho, -kI, out);
    effective_.multiply_right_adjoint_add(rho, kI, out);
    for (const Jump& jump : jumps_) add_jump_term(jump, rho, out);
  }

  /// Same as apply() for Hermitian rho, at roughly half the cost: the
  /// non-Hermitian half X = -iK rho + (paired jumps) is built once and
  /// symmetrized as X + X^dagger. `scratch` is a work buffer.
  void apply_hermitian(const ComplexMatrix& rho, ComplexMatrix& out,
                       ComplexMatrix& scratch) const {
    if (rho.rows() != dim() || rho.cols() != dim()) {
      throw std::invalid_argument("master_rhs: dimension mismatch");
    }
    scratch.setZero(dim(), dim());
    effective_.multiply_left_add(rho, -kI, scratch);
    for (const Jump& jump : jumps_) {
      if (jump.kind == JumpKind::pair_leader) add_jump_term(jump, rho, scratch);
    }
    out.resize(dim(), dim());
    out.noalias() = scratch + scratch.adjoint();
    for (const Jump& jump : jumps_) {
      if (jump.kind == JumpKind::self_adjoint) add_jump_term(jump, rho, out);
    }
  }

  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    ComplexMatrix out;
    apply(rho, out);
    return out;
  }

 private:
  // coef * left rho right^dagger for single-diagonal left/right factors:
  // entry (i, j) = coef * cl(i) * rho(i + dl, j + dr) * conj(cr(j)).
  enum class JumpKind { self_adjoint, pair_leader, pair_follower };

  struct Jump {
    Index row0, col0, row_shift, col_shift;
    ComplexMatrix weight;
    JumpKind kind;
  };

  static void add_jump_term(const Jump& jump, const ComplexMatrix& rho, ComplexMatrix& out) {
    out.block(jump.row0, jump.col0, jump.weight.rows(), jump.weight.cols()) +=
        jump.weight.cwiseProduct(rho.block(jump.row0 + jump.row_shift, jump.col0 + jump.col_shift,
                                           jump.weight.rows(), jump.weight.cols()));
  }

  void add_jump(const TwoModeOperator& left, const TwoModeOperator& right, Complex coef,
                JumpKind kind) {
    if (left.diagonals().size() != 1 || right.diagonals().size() != 1) {
      throw std::logic_error("MasterGenerator: jump factors must be single-diagonal");
    }
    const auto& [dl, cl] = *left.diagonals().begin();
    const auto& [dr, cr] = *right.diagonals().begin();
    const auto [r0, r1] = left.valid_rows(dl);
    const auto [c0, c1] = right.valid_rows(dr);
    if (r1 <= r0 || c1 <= c0) return;
    ComplexMatrix w = coef * cl.segment(r0, r1 - r0) * cr.segment(c0, c1 - c0).adjoint();
    if (kind == JumpKind::self_adjoint) w = (0.5 * (w + w.adjoint())).eval();
    jumps_.push_back({r0, c0, dl, dr, std::move(w), kind});
  }

  ModeDims dims_;
  TwoModeOperator effective_;
  std::vector<Jump> jumps_;
  double stiffness_;
};

inline ComplexMatrix master_rhs(const ModelOperators& model, const ComplexMatrix& rho) {
  return MasterGenerator(model)(rho);
}

namespace detail {

inline double hermiticity_error(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

struct StepPlan {
  double step;
  long long substeps;  // per sample interval
  std::vector<std::string> warnings;
};

inline StepPlan plan_steps(const IntegratorOptions& opts, double scale) {
  opts.validate();
  StepPlan plan;
  double target = opts.step.value_or(scale > 0.0 ? kDefaultStepFactor / scale
                                                 : opts.sample_interval);
  target = std::min(target, opts.sample_interval);
  plan.substeps = std::max<long long>(1, (long long)std::ceil(opts.sample_interval / target - 1e-9));
  plan.step = opts.sample_interval / double(plan.substeps);
  const double product = plan.step * scale;
  if (product > kHardStabilityLimit) {
    throw NumericalError("RK4 step " + std::to_string(plan.step) + " times stiffness " +
                             std::to_string(scale) + " = " + std::to_string(product) +
                             " exceeds the stability limit " +
                             std::to_string(kHardStabilityLimit),
                         0.0);
  }
  if (product > kSoftStabilityLimit) {
    plan.warnings.push_back("step * stiffness = " + std::to_string(product) + " exceeds " +
                            std::to_string(kSoftStabilityLimit) + "; accuracy may suffer");
  }
  return plan;
}

inline long long sample_count(const IntegratorOptions& opts) {
  return (long long)std::floor(opts.t_max / opts.sample_interval + 1e-9);
}

/// Classical RK4 on a linear autonomous system y' = f(y).
template <class State, class Rhs>
class Rk4 {
 public:
  Rk4(Rhs rhs, const State& like) : rhs_(std::move(rhs)), k1_(like), k2_(like), k3_(like), k4_(like), tmp_(like) {}

  void step(State& y, double h) {
    rhs_(y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    rhs_(tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    rhs_(tmp_, k3_);
    tmp_ = y + h * k3_;
    rhs_(tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  Rhs rhs_;
  State k1_, k2_, k3_, k4_, tmp_;
};

/// Halves `h` (doubling `substeps`) until one step and two half steps agree
/// to `tol` elementwise (Richardson estimate |y_h - y_{h/2}| / 15).
template <class State, class Stepper>
void refine_step(const State& y, Stepper& stepper, double& h, long long& substeps, double tol,
                 double t) {
  for (int halvings = 0; halvings < 40; ++halvings) {
    State coarse = y;
    stepper.step(coarse, h);
    State fine = y;
    stepper.step(fine, 0.5 * h);
    stepper.step(fine, 0.5 * h);
    const double err = (coarse - fine).cwiseAbs().maxCoeff() / 15.0;
    if (!std::isfinite(err)) throw NumericalError("non-finite error estimate", t);
    if (err < tol) return;
    h *= 0.5;
    substeps *= 2;
  }
  throw NumericalError("step doubling failed to reach the local tolerance", t);
}

}  // namespace detail

/// RK4 propagation of the master equation with uniform sampling.
inline EvolutionRecord evolve_master(const ModelOperators& model, const DensityMatrix& rho0,
                                     const IntegratorOptions& opts,
                                     const MasterObserver& observer = {}) {
  if (!(rho0.dims() == model.dims())) throw std::invalid_argument("evolve_master: dims mismatch");
  const MasterGenerator generator(model);
  detail::StepPlan plan = detail::plan_steps(opts, generator.stiffness());

  EvolutionRecord record;
  record.warnings = plan.warnings;
  // The Hermitian fast path keeps rho exactly Hermitian from here on.
  ComplexMatrix rho = 0.5 * (rho0.entries() + rho0.entries().adjoint());
  ComplexMatrix scratch;
  auto rhs = [&generator, &scratch](const ComplexMatrix& y, ComplexMatrix& out) {
    generator.apply_hermitian(y, out, scratch);
  };
  detail::Rk4<ComplexMatrix, decltype(rhs)> rk4(rhs, rho);

  const long long samples = detail::sample_count(opts);
  double h = plan.step;
  long long substeps = plan.substeps;

  auto observe = [&](double t) {
    if (!rho.allFinite()) throw NumericalError("state diverged (non-finite entries)", t);
    record.times.push_back(t);
    record.hermiticity_drift.push_back(detail::hermiticity_error(rho));
    ComplexMatrix snap = 0.5 * (rho + rho.adjoint());
    record.trace_drift.push_back(std::abs(snap.trace() - Complex{1.0}));
    if (observer) observer(t, snap);
    if (opts.keep_states) record.states.push_back(std::move(snap));
  };

  observe(0.0);
  for (long long k = 1; k <= samples; ++k) {
    const double t_prev = double(k - 1) * opts.sample_interval;
    if (opts.error_control == ErrorControl::step_doubling) {
      detail::refine_step(rho, rk4, h, substeps, opts.local_tolerance, t_prev);
    }
    for (long long s = 0; s < substeps; ++s) rk4.step(rho, h);
    record.steps_taken += substeps;
    observe(double(k) * opts.sample_interval);
  }
  record.step = h;
  return record;
}

/// RK4 propagation of d psi/dt = -i H psi (lossless runs only).
inline PureEvolutionRecord evolve_pure(const TwoModeOperator& hamiltonian,
                                       const TwoModeState& psi0, const IntegratorOptions& opts,
                                       const PureObserver& observer = {}) {
  if (!(psi0.dims() == hamiltonian.dims())) {
    throw std::invalid_argument("evolve_pure: dims mismatch");
  }
  detail::StepPlan plan = detail::plan_steps(opts, diagonal_gap(hamiltonian));

  PureEvolutionRecord record;
  record.warnings = plan.warnings;
  ComplexVector psi = psi0.amplitudes();
  auto rhs = [&hamiltonian](const ComplexVector& y, ComplexVector& out) {
    out = -kI * hamiltonian.apply(y);
  };
  detail::Rk4<ComplexVector, decltype(rhs)> rk4(rhs, psi);

  const long long samples = detail::sample_count(opts);
  double h = plan.step;
  long long substeps = plan.substeps;

  auto observe = [&](double t) {
    if (!psi.allFinite()) throw NumericalError("state diverged (non-finite entries)", t);
    record.times.push_back(t);
    record.norm_drift.push_back(std::abs(psi.norm() - 1.0));
    if (observer) observer(t, psi);
    if (opts.keep_states) record.states.emplace_back(psi0.dims(), psi);
  };

  observe(0.0);
  for (long long k = 1; k <= samples; ++k) {
    const double t_prev = double(k - 1) * opts.sample_interval;
    if (opts.error_control == ErrorControl::step_doubling) {
      detail::refine_step(psi, rk4, h, substeps, opts.local_tolerance, t_prev);
    }
    for (long long s = 0; s < substeps; ++s) rk4.step(psi, h);
    record.steps_taken += substeps;
    observe(double(k) * opts.sample_interval);
  }
  record.step = h;
  return record;
}

/// Column-stacked superoperator: column i + D*j is L(|i><j|).
inline ComplexMatrix liouvillian_matrix(const ModelOperators& model) {
  const MasterGenerator generator(model);
  const Index n = generator.dim();
  ComplexMatrix super(n * n, n * n);
  ComplexMatrix unit = ComplexMatrix::Zero(n, n);
  ComplexMatrix image;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      unit(i, j) = 1.0;
      generator.apply(unit, image);
      super.col(i + n * j) = Eigen::Map<const ComplexVector>(image.data(), n * n);
      unit(i, j) = 0.0;
    }
  }
  return super;
}

/// Exact propagation rho(t) = unvec(exp(L t) vec(rho0)) by scaling and squaring.
inline DensityMatrix expm_oracle(const ModelOperators& model, const DensityMatrix& rho0, double t,
                                 Index max_dim = 8) {
  const Index n = model.dims().dim();
  if (n > max_dim) {
    throw std::invalid_argument("expm_oracle: dimension " + std::to_string(n) +
                                " exceeds limit " + std::to_string(max_dim));
  }
  if (t == 0.0) return rho0;
  const ComplexMatrix propagator = (liouvillian_matrix(model) * Complex{t}).exp();
  const ComplexVector v =
      propagator * Eigen::Map<const ComplexVector>(rho0.entries().data(), n * n);
  ComplexMatrix rho = Eigen::Map<const ComplexMatrix>(v.data(), n, n);
  rho = 0.5 * (rho + rho.adjoint());
  return {model.dims(), std::move(rho)};
}

}  // namespace qscissors
