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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qscissors/fock.hpp"

namespace qscissors {
namespace {

TEST(BasisIndex, RowMajorModeAMajor) {
  const ModeDims dims(10, 10);
  EXPECT_EQ(basis_index(dims, 0, 0), 0);
  EXPECT_EQ(basis_index(dims, 2, 0), 20);
  EXPECT_EQ(basis_index(dims, 1, 2), 12);
}

TEST(BasisIndex, OutOfRangeThrows) {
  const ModeDims dims(5, 4);
  EXPECT_THROW(basis_index(dims, 5, 0), std::out_of_range);
  EXPECT_THROW(basis_index(dims, 0, 4), std::out_of_range);
  EXPECT_THROW(basis_index(dims, -1, 0), std::out_of_range);
  EXPECT_THROW(unindex(dims, 20), std::out_of_range);
}

TEST(BasisIndex, UnindexInvertsEveryIndex) {
  for (const ModeDims dims : {ModeDims(4, 4), ModeDims(7, 5), ModeDims(10, 10)}) {
    for (Index i = 0; i < dims.dim(); ++i) {
      const auto [n, m] = unindex(dims, i);
      EXPECT_EQ(basis_index(dims, n, m), i);
    }
  }
}

TEST(ModeDims, RejectsTooFewLevels) {
  EXPECT_THROW(ModeDims(3, 10), std::invalid_argument);
  EXPECT_THROW(ModeDims(10, 2), std::invalid_argument);
  EXPECT_EQ(ModeDims::single_mode(4).dim(), 4);
  EXPECT_FALSE(ModeDims::single_mode(4).admits_qutrit_qubit());
}

TEST(Annihilator, LadderElements) {
  const ModeDims dims(6, 5);
  const TwoModeOperator a = annihilator(dims, Mode::a);
  const TwoModeOperator b = annihilator(dims, Mode::b);
  for (int m = 0; m < 5; ++m) {
    EXPECT_EQ(a.entry(basis_index(dims, 0, m), basis_index(dims, 1, m)), Complex(1.0));
    EXPECT_NEAR(std::abs(a.entry(basis_index(dims, 1, m), basis_index(dims, 2, m)) - std::sqrt(2.0)),
                0.0, 1e-15);
  }
  EXPECT_NEAR(b.entry(basis_index(dims, 3, 2), basis_index(dims, 3, 3)).real(), std::sqrt(3.0),
              1e-15);
  // a|0,m> = 0
  const ComplexVector out = a.apply(TwoModeState::fock(dims, 0, 3).amplitudes());
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Annihilator, MatchesKroneckerConstruction) {
  const ModeDims dims(6, 4);
  EXPECT_EQ((annihilator(dims, Mode::a).to_dense() - oracle::lowering_a(6, 4)).cwiseAbs().maxCoeff(),
            0.0);
  EXPECT_EQ((annihilator(dims, Mode::b).to_dense() - oracle::lowering_b(6, 4)).cwiseAbs().maxCoeff(),
            0.0);
}

TEST(Annihilator, CommutatorIsIdentityOnInterior) {
  const ModeDims dims(6, 5);
  for (Mode mode : {Mode::a, Mode::b}) {
    const TwoModeOperator a = annihilator(dims, mode);
    const ComplexMatrix comm = (a * a.adjoint() - a.adjoint() * a).to_dense();
    const int top = dims.levels(mode) - 1;
    for (Index i = 0; i < dims.dim(); ++i) {
      for (Index j = 0; j < dims.dim(); ++j) {
        const auto [n, m] = unindex(dims, i);
        const int level = mode == Mode::a ? n : m;
        if (level == top) continue;  // truncation edge
        EXPECT_NEAR(std::abs(comm(i, j) - Complex(i == j ? 1.0 : 0.0)), 0.0, 1e-14) << i << "," << j;
      }
    }
  }
}

TEST(Annihilator, ModesCommute) {
  const ModeDims dims(5, 6);
  const TwoModeOperator a = annihilator(dims, Mode::a);
  const TwoModeOperator b = annihilator(dims, Mode::b);
  EXPECT_EQ((a * b - b * a).to_dense().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a * b.adjoint() - b.adjoint() * a).to_dense().cwiseAbs().maxCoeff(), 0.0);
}

TEST(TwoModeOperator, AlgebraMatchesDense) {
  std::mt19937_64 rng(7);
  const ModeDims dims(5, 4);
  const TwoModeOperator a = annihilator(dims, Mode::a);
  const TwoModeOperator b = annihilator(dims, Mode::b);
  const TwoModeOperator x = Complex(0.3, -1.2) * (a.adjoint() * a.adjoint() * b * b) + a;
  const ComplexMatrix da = oracle::lowering_a(5, 4), db = oracle::lowering_b(5, 4);
  const ComplexMatrix dx = Complex(0.3, -1.2) * da.adjoint() * da.adjoint() * db * db + da;
  EXPECT_LT((x.to_dense() - dx).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((x.adjoint().to_dense() - dx.adjoint()).cwiseAbs().maxCoeff(), 1e-14);

  const ComplexMatrix rho = oracle::random_matrix(rng, 20, 20);
  ComplexMatrix left = ComplexMatrix::Zero(20, 20), right = ComplexMatrix::Zero(20, 20);
  x.multiply_left_add(rho, 1.0, left);
  x.multiply_right_adjoint_add(rho, 1.0, right);
  EXPECT_LT((left - dx * rho).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((right - rho * dx.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  const ComplexVector v = oracle::random_matrix(rng, 20, 1);
  EXPECT_LT((x.apply(v) - dx * v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Expectation, IdentityGivesUnitTrace) {
  std::mt19937_64 rng(1);
  const ModeDims dims(4, 4);
  const DensityMatrix rho(dims, oracle::random_density(rng, 16));
  EXPECT_NEAR(std::abs(expectation(TwoModeOperator::identity(dims), rho) - Complex(1.0)), 0.0,
              1e-12);
}

TEST(Expectation, NumberOperatorOnFockState) {
  const ModeDims dims(5, 5);
  const DensityMatrix rho(TwoModeState::fock(dims, 2, 0));
  EXPECT_NEAR(std::abs(expectation(number_operator(dims, Mode::a), rho) - Complex(2.0)), 0.0,
              1e-14);
}

TEST(Expectation, ThermalLikeDiagonal) {
  const ModeDims dims(6, 4);
  const double weights[] = {5, 3, 2, 1, 0.5, 0.25};
  double norm = 0;
  for (double w : weights) norm += w * 4;
  ComplexMatrix rho = ComplexMatrix::Zero(24, 24);
  double expected = 0;  // direct sum over the diagonal
  for (int n = 0; n < 6; ++n) {
    for (int m = 0; m < 4; ++m) {
      const double p = weights[n] / norm;
      rho(basis_index(dims, n, m), basis_index(dims, n, m)) = p;
      expected += n * p;
    }
  }
  const DensityMatrix state(dims, rho);
  EXPECT_NEAR(expectation(number_operator(dims, Mode::a), state).real(), expected, 1e-14);
  EXPECT_THROW(expectation(number_operator(ModeDims(4, 4), Mode::a), state),
               std::invalid_argument);
}

TEST(DensityMatrix, RejectsInvalidInput) {
  const ModeDims dims(4, 4);
  ComplexMatrix m = ComplexMatrix::Zero(16, 16);
  m(0, 0) = 0.5;
  EXPECT_THROW(DensityMatrix(dims, m), std::invalid_argument);  // trace
  m(0, 0) = 1.0;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(dims, m), std::invalid_argument);  // not Hermitian
  EXPECT_THROW(DensityMatrix(dims, ComplexMatrix::Identity(4, 4)), std::invalid_argument);
}

TEST(TwoModeState, NormalizesOnConstruction) {
  const ModeDims dims(4, 4);
  ComplexVector v = ComplexVector::Zero(16);
  v[3] = 3.0;
  v[7] = Complex(0, 4.0);
  const TwoModeState psi(dims, v);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(TwoModeState(dims, ComplexVector::Zero(16)), std::invalid_argument);
}

}  // namespace
}  // namespace qscissors
