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
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qscissors {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

enum class Mode { a, b };

/// Fock-level cutoffs of the two oscillators. Level n of mode a runs over
/// 0..levels_a-1. Two-mode dims need at least four levels per mode; the
/// single-mode factory (levels_b == 1) exists for small oracle problems.
class ModeDims {
 public:
  ModeDims(int levels_a, int levels_b) : levels_a_(levels_a), levels_b_(levels_b) {
    if (levels_a < 4 || levels_b < 4) {
      throw std::invalid_argument("ModeDims: each mode needs at least 4 Fock levels (got " +
                                  std::to_string(levels_a) + "x" + std::to_string(levels_b) +
                                  ")");
    }
  }

  /// Mode a only; mode b is frozen in its vacuum and its ladder operator is zero.
  static ModeDims single_mode(int levels) {
    if (levels < 2) {
      throw std::invalid_argument("ModeDims: single mode needs at least 2 levels");
    }
    return ModeDims(levels, 1, Unchecked{});
  }

  static ModeDims defaults() { return {10, 10}; }

  int levels_a() const { return levels_a_; }
  int levels_b() const { return levels_b_; }
  int levels(Mode m) const { return m == Mode::a ? levels_a_ : levels_b_; }
  Index dim() const { return Index(levels_a_) * levels_b_; }
  bool is_single_mode() const { return levels_b_ == 1; }

  /// True when both modes contain levels 0, 1 and 2.
  bool admits_qutrit_qubit() const { return levels_a_ >= 3 && levels_b_ >= 3; }

  friend bool operator==(const ModeDims&, const ModeDims&) = default;

 private:
  struct Unchecked {};
  ModeDims(int la, int lb, Unchecked) : levels_a_(la), levels_b_(lb) {}

  int levels_a_;
  int levels_b_;
};

inline Index basis_index(const ModeDims& dims, int n, int m) {
  if (n < 0 || n >= dims.levels_a() || m < 0 || m >= dims.levels_b()) {
    throw std::out_of_range("basis_index: (" + std::to_string(n) + "," + std::to_string(m) +
                            ") outside " + std::to_string(dims.levels_a()) + "x" +
                            std::to_string(dims.levels_b()));
  }
  return Index(n) * dims.levels_b() + m;
}

/// Inverse of basis_index: returns (n_a, m_b).
inline std::pair<int, int> unindex(const ModeDims& dims, Index i) {
  if (i < 0 || i >= dims.dim()) {
    throw std::out_of_range("unindex: " + std::to_string(i) + " outside [0, " +
                            std::to_string(dims.dim()) + ")");
  }
  return {int(i / dims.levels_b()), int(i % dims.levels_b())};
}

/// Operator on the truncated two-mode Fock space, stored by diagonals.
///
/// Every operator in the model (ladder operators, their products, the Kerr
/// and coupling terms) shifts the basis index by a fixed amount, so each
/// one occupies a handful of diagonals. Diagonal `d` holds the entries
/// (i, i + d); coefficients whose column falls outside [0, D) are kept at
/// zero so that products never read out of range.
class TwoModeOperator {
 public:
  explicit TwoModeOperator(ModeDims dims) : dims_(dims) {}

  static TwoModeOperator zero(ModeDims dims) { return TwoModeOperator(dims); }

  static TwoModeOperator identity(ModeDims dims) {
    TwoModeOperator op(dims);
    op.diagonals_.emplace(0, ComplexVector::Ones(dims.dim()));
    return op;
  }

  /// Builds the operator from a single diagonal; entries with i + offset
  /// outside the space are dropped.
  static TwoModeOperator from_diagonal(ModeDims dims, Index offset, ComplexVector coeffs) {
    if (coeffs.size() != dims.dim()) {
      throw std::invalid_argument("TwoModeOperator: diagonal length mismatch");
    }
    TwoModeOperator op(dims);
    op.add_diagonal(offset, std::move(coeffs));
    return op;
  }

  const ModeDims& dims() const { return dims_; }
  Index dim() const { return dims_.dim(); }

  /// offset -> coefficients, ordered by offset.
  const std::map<Index, ComplexVector>& diagonals() const { return diagonals_; }

  Complex entry(Index row, Index col) const {
    auto it = diagonals_.find(col - row);
    if (it == diagonals_.end()) return {};
    return it->second[row];
  }

  ComplexMatrix to_dense() const {
    ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
    for (const auto& [d, c] : diagonals_) {
      const auto [lo, hi] = valid_rows(d);
      for (Index i = lo; i < hi; ++i) out(i, i + d) = c[i];
    }
    return out;
  }

  TwoModeOperator adjoint() const {
    TwoModeOperator out(dims_);
    for (const auto& [d, c] : diagonals_) {
      // (A^dagger)(i, i - d) = conj(A(i - d, i))
      ComplexVector cd = ComplexVector::Zero(dim());
      const auto [lo, hi] = valid_rows(-d);
      for (Index i = lo; i < hi; ++i) cd[i] = std::conj(c[i - d]);
      out.add_diagonal(-d, std::move(cd));
    }
    return out;
  }

  TwoModeOperator& operator+=(const TwoModeOperator& rhs) {
    check_dims(rhs);
    for (const auto& [d, c] : rhs.diagonals_) add_diagonal(d, c);
    return *this;
  }

  TwoModeOperator& operator-=(const TwoModeOperator& rhs) { return *this += (-1.0) * rhs; }

  TwoModeOperator& operator*=(Complex s) {
    for (auto& [d, c] : diagonals_) c *= s;
    return *this;
  }

  friend TwoModeOperator operator+(TwoModeOperator lhs, const TwoModeOperator& rhs) {
    return lhs += rhs;
  }
  friend TwoModeOperator operator-(TwoModeOperator lhs, const TwoModeOperator& rhs) {
    return lhs -= rhs;
  }
  friend TwoModeOperator operator*(Complex s, TwoModeOperator op) { return op *= s; }
  friend TwoModeOperator operator*(TwoModeOperator op, Complex s) { return op *= s; }

  friend TwoModeOperator operator*(const TwoModeOperator& lhs, const TwoModeOperator& rhs) {
    lhs.check_dims(rhs);
    TwoModeOperator out(lhs.dims_);
    const Index n = lhs.dim();
    for (const auto& [da, ca] : lhs.diagonals_) {
      for (const auto& [db, cb] : rhs.diagonals_) {
        // (AB)(i, i + da + db) = A(i, i + da) * B(i + da, i + da + db)
        ComplexVector c = ComplexVector::Zero(n);
        const auto [lo, hi] = lhs.valid_rows(da + db);
        bool any = false;
        for (Index i = lo; i < hi; ++i) {
          const Index k = i + da;
          if (k < 0 || k >= n) continue;
          c[i] = ca[i] * cb[k];
          any = any || c[i] != Complex{};
        }
        if (any) out.add_diagonal(da + db, std::move(c));
      }
    }
    return out;
  }

  ComplexVector apply(const ComplexVector& v) const {
    if (v.size() != dim()) throw std::invalid_argument("TwoModeOperator::apply: size mismatch");
    ComplexVector out = ComplexVector::Zero(dim());
    for (const auto& [d, c] : diagonals_) {
      const auto [lo, hi] = valid_rows(d);
      if (hi > lo) {
        out.segment(lo, hi - lo) +=
            c.segment(lo, hi - lo).cwiseProduct(v.segment(lo + d, hi - lo));
      }
    }
    return out;
  }

  /// out += scale * (this * rho)
  void multiply_left_add(const ComplexMatrix& rho, Complex scale, ComplexMatrix& out) const {
    for (const auto& [d, c] : diagonals_) {
      const auto [lo, hi] = valid_rows(d);
      if (hi <= lo) continue;
      const ComplexVector s = scale * c.segment(lo, hi - lo);
      out.middleRows(lo, hi - lo).noalias() +=
          s.asDiagonal() * rho.middleRows(lo + d, hi - lo);
    }
  }

  /// out += scale * (rho * this^dagger)
  void multiply_right_adjoint_add(const ComplexMatrix& rho, Complex scale,
                                  ComplexMatrix& out) const {
    for (const auto& [d, c] : diagonals_) {
      const auto [lo, hi] = valid_rows(d);
      if (hi <= lo) continue;
      const ComplexVector s = scale * c.segment(lo, hi - lo).conjugate();
      out.middleCols(lo, hi - lo).noalias() +=
          rho.middleCols(lo + d, hi - lo) * s.asDiagonal();
    }
  }

  /// Largest elementwise |A - A^dagger|.
  double hermiticity_error() const {
    return (to_dense() - to_dense().adjoint()).cwiseAbs().maxCoeff();
  }

  /// Row range [lo, hi) for which column i + offset is inside the space.
  std::pair<Index, Index> valid_rows(Index offset) const {
    return {std::max<Index>(0, -offset), std::min<Index>(dim(), dim() - offset)};
  }

 private:
  void check_dims(const TwoModeOperator& other) const {
    if (!(dims_ == other.dims_)) throw std::invalid_argument("TwoModeOperator: dims mismatch");
  }

  void add_diagonal(Index offset, ComplexVector coeffs) {
    if (offset <= -dim() || offset >= dim()) return;
    const auto [lo, hi] = valid_rows(offset);
    coeffs.head(lo).setZero();
    coeffs.tail(dim() - hi).setZero();
    auto it = diagonals_.find(offset);
    if (it == diagonals_.end()) {
      diagonals_.emplace(offset, std::move(coeffs));
    } else {
      it->second += coeffs;
    }
  }

  ModeDims dims_;
  std::map<Index, ComplexVector> diagonals_;
};

/// Ladder operator: <n-1,m|a|n,m> = sqrt(n) or <n,m-1|b|n,m> = sqrt(m).
inline TwoModeOperator annihilator(const ModeDims& dims, Mode mode) {
  const Index n = dims.dim();
  const Index offset = mode == Mode::a ? dims.levels_b() : 1;
  ComplexVector c = ComplexVector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const auto [na, mb] = unindex(dims, i);
    // row i = (n, m) reads column (n+1, m) or (n, m+1)
    if (mode == Mode::a && na + 1 < dims.levels_a()) c[i] = std::sqrt(double(na + 1));
    if (mode == Mode::b && mb + 1 < dims.levels_b()) c[i] = std::sqrt(double(mb + 1));
  }
  return TwoModeOperator::from_diagonal(dims, offset, std::move(c));
}

inline TwoModeOperator creator(const ModeDims& dims, Mode mode) {
  return annihilator(dims, mode).adjoint();
}

inline TwoModeOperator number_operator(const ModeDims& dims, Mode mode) {
  return creator(dims, mode) * annihilator(dims, mode);
}

/// Normalized pure state on the two-mode space; c_{n,m} lives at basis_index(n, m).
class TwoModeState {
 public:
  TwoModeState(ModeDims dims, ComplexVector amplitudes)
      : dims_(dims), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != dims_.dim()) {
      throw std::invalid_argument("TwoModeState: amplitude vector has wrong length");
    }
    const double norm = amplitudes_.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument("TwoModeState: zero or non-finite amplitudes");
    }
    amplitudes_ /= norm;
  }

  static TwoModeState fock(ModeDims dims, int n, int m) {
    ComplexVector v = ComplexVector::Zero(dims.dim());
    v[basis_index(dims, n, m)] = 1.0;
    return {dims, std::move(v)};
  }

  const ModeDims& dims() const { return dims_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(int n, int m) const { return amplitudes_[basis_index(dims_, n, m)]; }

 private:
  ModeDims dims_;
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace density matrix on the full simulation space.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  DensityMatrix(ModeDims dims, ComplexMatrix entries)
      : dims_(dims), entries_(std::move(entries)) {
    if (entries_.rows() != dims_.dim() || entries_.cols() != dims_.dim()) {
      throw std::invalid_argument("DensityMatrix: entries have wrong shape");
    }
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kTolerance) {
      throw std::invalid_argument("DensityMatrix: not Hermitian (max |rho - rho^dagger| = " +
                                  std::to_string(herm) + ")");
    }
    const double tr_err = std::abs(entries_.trace() - Complex{1.0});
    if (tr_err > kTolerance) {
      throw std::invalid_argument("DensityMatrix: trace differs from 1 by " +
                                  std::to_string(tr_err));
    }
  }

  explicit DensityMatrix(const TwoModeState& psi)
      : DensityMatrix(psi.dims(), psi.amplitudes() * psi.amplitudes().adjoint()) {}

  const ModeDims& dims() const { return dims_; }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  ModeDims dims_;
  ComplexMatrix entries_;
};

/// Tr(op * rho).
inline Complex expectation(const TwoModeOperator& op, const ComplexMatrix& rho) {
  if (rho.rows() != op.dim() || rho.cols() != op.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  Complex acc{};
  for (const auto& [d, c] : op.diagonals()) {
    // Tr(A rho) = sum_i A(i, i + d) rho(i + d, i)
    const auto [lo, hi] = op.valid_rows(d);
    for (Index i = lo; i < hi; ++i) acc += c[i] * rho(i + d, i);
  }
  return acc;
}

inline Complex expectation(const TwoModeOperator& op, const DensityMatrix& rho) {
  if (!(op.dims() == rho.dims())) throw std::invalid_argument("expectation: dims mismatch");
  return expectation(op, rho.entries());
}

}  // namespace qscissors
