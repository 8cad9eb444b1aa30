// Copyright 2026 The rpzeno Authors
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

// Nakajima-Zwanzig relaxation for random-field fluctuations on both
// electrons (uncorrelated, equal variance in x, y, z), Markovian limit with
// exponential correlation functions.
//
// R rho = -Sum_j [A_j, F_j rho],
// F_j rho = V (J o (V^-1 [A_j, rho] V^-+)) V^+,
// J_mn = J(w_mn),  w_mn = -(l_m - l_n*) + i k_f  (k_f term optional).

#include "core/dynamics.hpp"

namespace rpzeno {

struct RelaxationSpec {
  enum class Model { None, RandomField };

  Model model = Model::None;
  double rate = 0.0;    // effective rate gamma = <dB^2> tau_c, 1/us
  double tau_c = 1e-3;  // us
  bool kernel_includes_kf = true;

  double variance() const { return rate / tau_c; }
  bool active() const { return model == Model::RandomField && rate > 0.0; }
  void validate() const;
  bool operator==(const RelaxationSpec&) const = default;
};

/// variance / (1/tau_c - i omega); omega may be complex.
Complex spectral_density(Complex omega, double variance, double tau_c);

/// Relaxation superoperator acting on vec(V^-1 rho V^-+) (column stacked).
CMatrix nz_relaxation_eigenbasis(const EigenSystem& eig, const RelaxationSpec& relax,
                                 const SpinSystem& system, double k_f,
                                 std::size_t dim_cap = kDefaultLiouvilleDimCap);

/// Relaxation superoperator in the Zeeman product basis (column stacked).
CMatrix nz_relaxation(const EigenSystem& eig, const RelaxationSpec& relax,
                      const SpinSystem& system, double k_f,
                      std::size_t dim_cap = kDefaultLiouvilleDimCap);

/// Phi_b = -k_b tr[P_b unvec(L_total^-1 vec(rho0))] via one LU solve.
double yield_liouville(const CMatrix& total_liouvillian, const CMatrix& rho0,
                       const CMatrix& projector, double k_b);

/// Same yield, solved in the H_eff eigenbasis where the coherent part of the
/// generator is diagonal.
double yield_relaxed(const EigenSystem& eig, const RelaxationSpec& relax,
                     const SpinSystem& system, const CMatrix& rho0, const CMatrix& projector,
                     double k_b, double k_f, std::size_t dim_cap = kDefaultLiouvilleDimCap);

}  // namespace rpzeno
