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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qscissors/fock.hpp"

namespace qscissors {

/// Physical constants of the driven Kerr coupler in a squeezed bath.
/// Rates and couplings are absolute angular frequencies.
struct SystemParams {
  double chi_a = 25.0;
  double chi_b = 25.0;
  double epsilon = 0.1;
  Complex alpha = 0.1;
  double gamma_a = 0.0025;
  double gamma_b = 0.0025;
  double N_a = 2.0;
  double N_b = 0.0;
  double phi = 0.0;
  /// Replace the squeezed bath by a thermal one with the same N (M_j = 0).
  bool thermal_only = false;

  void validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
      throw std::invalid_argument("SystemParams." + key + ": " + why);
    };
    auto finite = [&](const std::string& key, double v) {
      if (!std::isfinite(v)) fail(key, "must be finite");
    };
    finite("chi_a", chi_a);
    finite("chi_b", chi_b);
    finite("epsilon", epsilon);
    finite("alpha", alpha.real());
    finite("alpha", alpha.imag());
    finite("gamma_a", gamma_a);
    finite("gamma_b", gamma_b);
    finite("N_a", N_a);
    finite("N_b", N_b);
    finite("phi", phi);
    if (chi_a <= 0.0) fail("chi_a", "must be > 0");
    if (chi_b <= 0.0) fail("chi_b", "must be > 0");
    if (gamma_a < 0.0) fail("gamma_a", "must be >= 0");
    if (gamma_b < 0.0) fail("gamma_b", "must be >= 0");
    if (N_a < 0.0) fail("N_a", "must be >= 0");
    if (N_b < 0.0) fail("N_b", "must be >= 0");
    if (phi < 0.0 || phi >= 2.0 * std::numbers::pi) fail("phi", "must lie in [0, 2pi)");
  }
};

/// Reservoir coefficients of one mode. M = sqrt(N(N+1)) exp(-i phi).
struct ModeBath {
  double gamma = 0.0;
  double N = 0.0;
  Complex M{};
};

struct ModelOperators {
  TwoModeOperator hamiltonian;
  ModeBath bath_a;
  ModeBath bath_b;

  const ModeDims& dims() const { return hamiltonian.dims(); }
  const ModeBath& bath(Mode m) const { return m == Mode::a ? bath_a : bath_b; }
};

/// Squeezing correlation for occupation N and phase phi.
inline Complex squeezing_coefficient(double N, double phi) {
  return std::sqrt(N * (N + 1.0)) * std::exp(Complex{0.0, -phi});
}

/// H = chi_a/2 a+^2 a^2 + chi_b/2 b+^2 b^2 + [eps a+^2 b^2 + h.c.] + [alpha a+ + h.c.]
inline TwoModeOperator build_hamiltonian(const SystemParams& params, const ModeDims& dims) {
  params.validate();
  const Index n = dims.dim();
  ComplexVector kerr = ComplexVector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const auto [na, mb] = unindex(dims, i);
    kerr[i] = 0.5 * params.chi_a * na * (na - 1) + 0.5 * params.chi_b * mb * (mb - 1);
  }
  TwoModeOperator h = TwoModeOperator::from_diagonal(dims, 0, std::move(kerr));

  const TwoModeOperator a = annihilator(dims, Mode::a);
  const TwoModeOperator b = annihilator(dims, Mode::b);
  const TwoModeOperator ad = a.adjoint();
  const TwoModeOperator bd = b.adjoint();

  // Off-diagonal parts are assembled as T + T^dagger so H is exactly Hermitian.
  if (params.epsilon != 0.0) {
    const TwoModeOperator coupling = Complex{params.epsilon} * (ad * ad * b * b);
    h += coupling;
    h += coupling.adjoint();
  }
  if (params.alpha != Complex{}) {
    const TwoModeOperator pump = params.alpha * ad;
    h += pump;
    h += pump.adjoint();
  }
  return h;
}

inline ModelOperators build_model(const SystemParams& params, const ModeDims& dims) {
  ModelOperators model{build_hamiltonian(params, dims), {}, {}};
  const Complex zero{};
  model.bath_a = {params.gamma_a, params.N_a,
                  params.thermal_only ? zero : squeezing_coefficient(params.N_a, params.phi)};
  model.bath_b = {params.gamma_b, params.N_b,
                  params.thermal_only ? zero : squeezing_coefficient(params.N_b, params.phi)};
  return model;
}

}  // namespace qscissors
