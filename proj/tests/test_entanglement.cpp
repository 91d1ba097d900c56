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
#include <unsupported/Eigen/KroneckerProduct>

#include "oracles.hpp"
#include "qscissors/entanglement.hpp"

namespace qscissors {
namespace {

const ModeDims kDims(5, 5);

Matrix6 b3_projector() {
  Matrix6 m = Matrix6::Zero();
  m(3, 3) = m(3, 4) = m(4, 3) = m(4, 4) = 0.5;
  return m;
}

Matrix6 random_density6(std::mt19937_64& rng) { return oracle::random_density(rng, 6); }

TEST(BellState, Amplitudes) {
  const double r = 1.0 / std::sqrt(2.0);
  const TwoModeState b1 = bell_state(BellKind::B1, kDims);
  const TwoModeState b2 = bell_state(BellKind::B2, kDims);
  const TwoModeState b3 = bell_state(BellKind::B3, kDims);
  EXPECT_EQ(b3.amplitude(2, 0), Complex(r));
  EXPECT_EQ(b3.amplitude(1, 2), Complex(r));
  EXPECT_EQ(b1.amplitude(0, 2), Complex(0.0, r));
  EXPECT_EQ(b2.amplitude(0, 2), Complex(0.0, -r));
  for (const auto* s : {&b1, &b2, &b3}) EXPECT_NEAR(s->amplitudes().norm(), 1.0, 1e-15);
}

TEST(BellState, RejectsSmallDims) {
  EXPECT_THROW(bell_state(BellKind::B3, ModeDims::single_mode(4)), std::invalid_argument);
}

TEST(Truncation, BellProjector) {
  const TruncatedState t = truncate_qutrit_qubit(DensityMatrix(bell_state(BellKind::B3, kDims)));
  EXPECT_LT((t.entries() - b3_projector()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(t.trace(), 1.0, 1e-15);
}

TEST(Truncation, OrthogonalSupport) {
  const TruncatedState t = truncate_qutrit_qubit(DensityMatrix(TwoModeState::fock(kDims, 3, 3)));
  EXPECT_EQ(t.entries().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.trace(), 0.0);
}

TEST(Truncation, HalfMixture) {
  const ComplexMatrix b3 = DensityMatrix(bell_state(BellKind::B3, kDims)).entries();
  const ComplexMatrix far = DensityMatrix(TwoModeState::fock(kDims, 3, 3)).entries();
  const TruncatedState t = truncate_qutrit_qubit(DensityMatrix(kDims, 0.5 * b3 + 0.5 * far));
  EXPECT_LT((t.entries() - 0.5 * b3_projector()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(t.trace(), 0.5, 1e-15);
}

TEST(Truncation, BasisOrderFollowsQubitIndex) {
  for (int k = 0; k < 6; ++k) {
    const auto [n, m] = TruncatedState::kBasis[k];
    const TruncatedState t = truncate_qutrit_qubit(DensityMatrix(TwoModeState::fock(kDims, n, m)));
    EXPECT_EQ(t.entries()(k, k), Complex(1.0));
    EXPECT_EQ(k, 2 * n + m / 2);
  }
}

TEST(Truncation, LinearPositiveTraceNonincreasing) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix r1 = oracle::random_density(rng, 25);
    const ComplexMatrix r2 = oracle::random_density(rng, 25);
    const TruncatedState t1 = truncate_qutrit_qubit(kDims, r1);
    const TruncatedState t2 = truncate_qutrit_qubit(kDims, r2);
    const TruncatedState mix = truncate_qutrit_qubit(kDims, 0.3 * r1 + 0.7 * r2);
    EXPECT_LT((mix.entries() - (0.3 * t1.entries() + 0.7 * t2.entries())).cwiseAbs().maxCoeff(),
              1e-15);
    EXPECT_GE(t1.trace(), 0.0);
    EXPECT_LE(t1.trace(), r1.trace().real() + 1e-12);
    EXPECT_GE(oracle::min_eigenvalue(t1.entries()), -1e-14);
  }
}

TEST(TruncatedState, Invariants) {
  Matrix6 m = b3_projector();
  m(0, 1) = 0.1;
  EXPECT_THROW(TruncatedState{m}, std::invalid_argument);
  EXPECT_THROW(TruncatedState{Matrix6(2.0 * b3_projector())}, std::invalid_argument);
  EXPECT_NO_THROW(TruncatedState{Matrix6::Zero()});
}

TEST(PartialTranspose, ProductState) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix ra = oracle::random_density(rng, 3);
    const ComplexMatrix rb = oracle::random_density(rng, 2);
    const Matrix6 prod = Eigen::kroneckerProduct(ra, rb).eval();
    const Matrix6 expected = Eigen::kroneckerProduct(ra, ComplexMatrix(rb.conjugate())).eval();
    EXPECT_LT((partial_transpose_qubit(prod) - expected).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GE(oracle::min_eigenvalue(partial_transpose_qubit(prod)), -1e-14);
  }
}

TEST(PartialTranspose, InvolutionAndTrace) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const Matrix6 h = oracle::random_hermitian(rng, 6);
    const Matrix6 pt = partial_transpose_qubit(h);
    EXPECT_EQ(partial_transpose_qubit(pt), h);
    EXPECT_NEAR(std::abs(pt.trace() - h.trace()), 0.0, 1e-14);
    EXPECT_LT((pt - pt.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(PartialTranspose, BellSpectrum) {
  const Matrix6 pt = partial_transpose_qubit(b3_projector());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((ComplexMatrix(pt)));
  const Eigen::VectorXd expected = (Eigen::VectorXd(6) << -0.5, 0, 0, 0.5, 0.5, 0.5).finished();
  EXPECT_LT((es.eigenvalues() - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((jacobi_eigenvalues<6>(pt) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Jacobi, MatchesReferenceSolver) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 200; ++k) {
    const Matrix6 h = oracle::random_hermitian(rng, 6);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((ComplexMatrix(h)), Eigen::EigenvaluesOnly);
    EXPECT_LT((jacobi_eigenvalues<6>(h) - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Jacobi, DegenerateAndDiagonalInputs) {
  EXPECT_EQ(jacobi_eigenvalues<6>(Matrix6::Identity()), (RealVector6::Ones()));
  Matrix6 d = Matrix6::Zero();
  d.diagonal() << 3, -1, 2, 0, 5, -4;
  const RealVector6 ev = jacobi_eigenvalues<6>(d);
  EXPECT_EQ(ev, (RealVector6() << -4, -1, 0, 2, 3, 5).finished());
}

TEST(Negativity, KnownValues) {
  EXPECT_NEAR(negativity(TruncatedState(b3_projector())), 1.0, 1e-12);
  EXPECT_EQ(negativity(TruncatedState(Matrix6(Matrix6::Identity() / 6.0))), 0.0);
  EXPECT_EQ(negativity(TruncatedState(Matrix6::Zero())), 0.0);
  EXPECT_EQ(negativity(TruncatedState(Matrix6::Zero()), true), 0.0);
}

TEST(Negativity, WernerFamily) {
  // p |B3><B3| + (1 - p) I/6 has lambda_min = (1 - p)/6 - p/2.
  for (double p : {0.0, 0.1, 0.25, 0.3, 0.5, 0.9}) {
    const Matrix6 rho = p * b3_projector() + (1.0 - p) * Matrix6::Identity() / 6.0;
    const double expected = std::max(0.0, p - (1.0 - p) / 3.0);
    EXPECT_NEAR(negativity(TruncatedState(rho)), expected, 1e-12) << "p = " << p;
  }
}

TEST(Negativity, SeparableStatesGiveZero) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 1000; ++k) {
    const Matrix6 rho = oracle::random_separable_3x2(rng, 1 + k % 6);
    EXPECT_LE(negativity(TruncatedState(rho)), 1e-10);
  }
}

TEST(Negativity, LocalUnitaryInvariance) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 100; ++k) {
    const Matrix6 rho = random_density6(rng);
    const Matrix6 u = Eigen::kroneckerProduct(oracle::random_unitary(rng, 3),
                                              oracle::random_unitary(rng, 2))
                          .eval();
    Matrix6 rotated = u * rho * u.adjoint();
    rotated = 0.5 * (rotated + rotated.adjoint()).eval();
    EXPECT_NEAR(negativity(TruncatedState(rotated)), negativity(TruncatedState(rho)), 1e-9);
  }
}

TEST(Negativity, ScalingCovarianceAndRenormalization) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const Matrix6 rho = random_density6(rng);
    const double full = negativity(TruncatedState(rho));
    for (double c : {0.01, 0.3, 0.77}) {
      const TruncatedState scaled(Matrix6(c * rho));
      EXPECT_NEAR(negativity(scaled), c * full, 1e-13);
      EXPECT_NEAR(negativity(scaled, true), full, 1e-12);
    }
  }
}

TEST(Negativity, EntangledPureStates) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix g = oracle::random_matrix(rng, 3, 2);
    const Eigen::VectorXcd psi = Eigen::Map<const Eigen::VectorXcd>(
        ComplexMatrix(g.transpose()).data(), 6).normalized();
    const Eigen::JacobiSVD<ComplexMatrix> svd(g / g.norm());
    const Eigen::VectorXd s = svd.singularValues();
    const Matrix6 rho = psi * psi.adjoint();
    // pure-state negativity is 2 s1 s2 for Schmidt coefficients s1, s2
    EXPECT_NEAR(negativity(TruncatedState(rho)), 2.0 * s[0] * s[1], 1e-12);
  }
}

TEST(TruncationFidelity, Examples) {
  EXPECT_NEAR(truncation_fidelity(bell_state(BellKind::B3, kDims)), 1.0, 1e-15);
  EXPECT_EQ(truncation_fidelity(TwoModeState::fock(kDims, 0, 0)), 0.0);
  ComplexVector v = ComplexVector::Zero(kDims.dim());
  v[basis_index(kDims, 2, 0)] = 1.0;
  v[basis_index(kDims, 3, 3)] = 1.0;
  EXPECT_NEAR(truncation_fidelity(TwoModeState(kDims, v)), 0.5, 1e-15);
}

TEST(NegativitySeries, RequiresIncreasingTimes) {
  NegativitySeries s;
  s.push_back(0.0, 1.0, 1.0);
  s.push_back(0.2, 0.9, 1.0);
  EXPECT_THROW(s.push_back(0.2, 0.8, 1.0), std::invalid_argument);
  EXPECT_THROW(s.push_back(0.1, 0.8, 1.0), std::invalid_argument);
  EXPECT_EQ(s.size(), 2u);
}

}  // namespace
}  // namespace qscissors
