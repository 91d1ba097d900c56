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
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qscissors/fock.hpp"

namespace qscissors {

using Matrix6 = Eigen::Matrix<Complex, 6, 6>;
using RealVector6 = Eigen::Matrix<double, 6, 1>;

/// Qutrit (mode a levels 0,1,2) x qubit (mode b levels 0,2) block of rho.
/// Basis order: (0,0) (0,2) (1,0) (1,2) (2,0) (2,2), i.e. row = 2 * n_a + q
/// with q = m_b / 2. Not renormalized: the trace is the population left in
/// the subspace.
class TruncatedState {
 public:
  static constexpr double kTolerance = 1e-10;
  static constexpr std::array<std::pair<int, int>, 6> kBasis{
      {{0, 0}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 2}}};

  explicit TruncatedState(const Matrix6& entries) : entries_(entries) {
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kTolerance) {
      throw std::invalid_argument("TruncatedState: not Hermitian (max |rho - rho^dagger| = " +
                                  std::to_string(herm) + ")");
    }
    const double tr = entries_.trace().real();
    if (tr < -kTolerance || tr > 1.0 + kTolerance) {
      throw std::invalid_argument("TruncatedState: trace " + std::to_string(tr) +
                                  " outside [0, 1]");
    }
  }

  const Matrix6& entries() const { return entries_; }
  double trace() const { return entries_.trace().real(); }

  /// Diagonal populations in basis order.
  RealVector6 populations() const { return entries_.diagonal().real(); }

 private:
  Matrix6 entries_;
};

enum class BellKind { B1, B2, B3 };

/// B1 = (|2,0> + i|0,2>)/sqrt2, B2 = (|2,0> - i|0,2>)/sqrt2, B3 = (|2,0> + |1,2>)/sqrt2.
inline TwoModeState bell_state(BellKind kind, const ModeDims& dims) {
  if (!dims.admits_qutrit_qubit()) {
    throw std::invalid_argument("bell_state: both modes need levels 0..2");
  }
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(dims.dim());
  v[basis_index(dims, 2, 0)] = r;
  switch (kind) {
    case BellKind::B1: v[basis_index(dims, 0, 2)] = Complex{0.0, r}; break;
    case BellKind::B2: v[basis_index(dims, 0, 2)] = Complex{0.0, -r}; break;
    case BellKind::B3: v[basis_index(dims, 1, 2)] = r; break;
  }
  return {dims, std::move(v)};
}

/// Sandwich (P_a x P_b) rho (P_a x P_b) with P_a = sum_{n<=2} |n><n| and
/// P_b = |0><0| + |2><2|, compressed to 6x6.
inline TruncatedState truncate_qutrit_qubit(const ModeDims& dims, const ComplexMatrix& rho) {
  if (!dims.admits_qutrit_qubit()) {
    throw std::invalid_argument("truncate_qutrit_qubit: both modes need levels 0..2");
  }
  if (rho.rows() != dims.dim() || rho.cols() != dims.dim()) {
    throw std::invalid_argument("truncate_qutrit_qubit: dimension mismatch");
  }
  std::array<Index, 6> idx{};
  for (int k = 0; k < 6; ++k) {
    idx[k] = basis_index(dims, TruncatedState::kBasis[k].first, TruncatedState::kBasis[k].second);
  }
  Matrix6 out;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) out(r, c) = rho(idx[r], idx[c]);
  }
  return TruncatedState(out);
}

inline TruncatedState truncate_qutrit_qubit(const DensityMatrix& rho) {
  return truncate_qutrit_qubit(rho.dims(), rho.entries());
}

/// Transpose on the qubit factor: out((i,m),(j,n)) = in((i,n),(j,m)).
inline Matrix6 partial_transpose_qubit(const Matrix6& rho) {
  Matrix6 out;
  for (int i = 0; i < 3; ++i) {
    for (int m = 0; m < 2; ++m) {
      for (int j = 0; j < 3; ++j) {
        for (int n = 0; n < 2; ++n) out(2 * i + m, 2 * j + n) = rho(2 * i + n, 2 * j + m);
      }
    }
  }
  return out;
}

inline Matrix6 partial_transpose_qubit(const TruncatedState& rho) {
  return partial_transpose_qubit(rho.entries());
}

/// Eigenvalues (ascending) of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Sweeps until every off-diagonal magnitude drops below
/// `off_tol` times max(1, ||A||_F).
template <int N>
Eigen::Matrix<double, N, 1> jacobi_eigenvalues(const Eigen::Matrix<Complex, N, N>& input,
                                               double off_tol = 1e-13, int max_sweeps = 64) {
  Eigen::Matrix<Complex, N, N> a = 0.5 * (input + input.adjoint());
  const double threshold = off_tol * std::max(1.0, a.norm());
  auto off_max = [&a] {
    double m = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) m = std::max(m, std::abs(a(p, q)));
    return m;
  };
  int sweep = 0;
  for (; sweep < max_sweeps && off_max() >= threshold; ++sweep) {
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Rotation J with J_pp = J_qq = c, J_pq = s e^{i theta}, J_qp = -s e^{-i theta}
        // zeroes a(p, q) in J^dagger A J.
        const Complex phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex sp = s * phase;
        for (int k = 0; k < N; ++k) {  // A <- A J
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - std::conj(sp) * akq;
          a(k, q) = sp * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {  // A <- J^dagger A
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - sp * aqk;
          a(q, k) = std::conj(sp) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (off_max() >= threshold) {
    throw std::runtime_error("jacobi_eigenvalues: no convergence after " +
                             std::to_string(max_sweeps) + " sweeps");
  }
  Eigen::Matrix<double, N, 1> ev = a.diagonal().real();
  std::sort(ev.data(), ev.data() + N);
  return ev;
}

/// max(0, -2 lambda_min) of the qubit partial transpose. With `renormalize`
/// the state is divided by its trace first (zero when the trace < 1e-12).
inline double negativity(const TruncatedState& rho, bool renormalize = false) {
  Matrix6 m = rho.entries();
  if (renormalize) {
    const double tr = rho.trace();
    if (tr < 1e-12) return 0.0;
    m /= tr;
  }
  const RealVector6 ev = jacobi_eigenvalues<6>(partial_transpose_qubit(m));
  return std::max(0.0, -2.0 * ev[0]);
}

/// Weight of psi inside span{|0,2>, |1,2>, |2,0>}.
inline double truncation_fidelity(const TwoModeState& psi) {
  if (!psi.dims().admits_qutrit_qubit()) {
    throw std::invalid_argument("truncation_fidelity: both modes need levels 0..2");
  }
  return std::norm(psi.amplitude(0, 2)) + std::norm(psi.amplitude(1, 2)) +
         std::norm(psi.amplitude(2, 0));
}

/// Sampled negativity and subspace trace; times in units of 1/chi_a.
struct NegativitySeries {
  std::vector<double> times_chi;
  std::vector<double> negativity;
  std::vector<double> trunc_trace;
  std::vector<RealVector6> populations;  // optional, empty when not recorded

  std::size_t size() const { return times_chi.size(); }
  bool empty() const { return times_chi.empty(); }

  void push_back(double t_chi, double neg, double trace) {
    if (!times_chi.empty() && !(t_chi > times_chi.back())) {
      throw std::invalid_argument("NegativitySeries: times must increase strictly");
    }
    times_chi.push_back(t_chi);
    negativity.push_back(neg);
    trunc_trace.push_back(trace);
  }
};

}  // namespace qscissors
