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

// Relaxation-free master equation solved in the (non-unitary) eigenbasis of
// H_eff = H - i (k_b / 2) P_b, plus the Liouville-space generator.
//
// Liouville space uses column stacking: vec(A X B) = (B^T (x) A) vec(X).

#include <span>
#include <vector>

#include "core/ciss.hpp"
#include "core/spin_core.hpp"

namespace rpzeno {

struct EffectiveHamiltonian {
  CMatrix matrix;       // H - i K
  CMatrix hamiltonian;  // H
  CMatrix projector;    // P_b
  double k_b = 0.0;
};

EffectiveHamiltonian effective_hamiltonian(const CMatrix& hamiltonian, const CMatrix& projector,
                                           double k_b);

struct EigenSystem {
  CVector eigenvalues;  // rad/us, sorted by (Re, Im)
  CMatrix vectors;      // right eigenvectors as columns
  CMatrix inverse;
  double condition = 1.0;  // ||V||_1 ||V^-1||_1
};

struct EigenOptions {
  double condition_limit = 1e12;
};

/// Throws ErrorKind::DegenerateDecomposition when V is too ill-conditioned.
EigenSystem eigendecompose(const EffectiveHamiltonian& heff, const EigenOptions& options = {});

/// Retries once with k_b scaled by (1 + 1e-9) when the decomposition is
/// near-defective. `perturbed` reports whether the fallback was used.
EigenSystem eigendecompose_with_fallback(const CMatrix& hamiltonian, const CMatrix& projector,
                                         double k_b, bool* perturbed = nullptr,
                                         const EigenOptions& options = {});

/// rho0 and an observable transformed into the eigenbasis. Evaluates
/// k Sum_mn rho~_mn O~_nm / (k_f + i (l_m - l_n*)) for any k_f without
/// re-diagonalizing.
class YieldKernel {
 public:
  YieldKernel(const EigenSystem& eig, const CMatrix& rho0, const CMatrix& observable);

  /// Complex value of Sum_mn rho~_mn O~_nm / (k_f + i (l_m - l_n*)).
  Complex integral(double k_f) const;

 private:
  std::vector<Complex> weights_;  // rho~_mn O~_nm
  std::vector<Complex> rates_;    // i (l_m - l_n*)
};

/// Converts a raw complex yield to a probability: the imaginary residue and
/// range excursion must both be below 1e-8 before clamping to [0, 1].
double finalize_yield(Complex raw, const char* what);

double yield_closed_form(const EigenSystem& eig, const CMatrix& rho0, const CMatrix& projector,
                         double k_b, double k_f);

std::vector<DensityOperator> trajectory(const EigenSystem& eig, const CMatrix& rho0, double k_f,
                                        std::span<const double> times);

/// Density operator at time t (unnormalized) via the eigenbasis.
CMatrix evolve(const EigenSystem& eig, const CMatrix& rho0_tilde, double k_f, double t);

/// V^-1 rho (V^-1)^+
CMatrix to_eigenbasis(const EigenSystem& eig, const CMatrix& rho);

inline constexpr std::size_t kDefaultLiouvilleDimCap = 160;

/// L = -i (I (x) H_eff - conj(H_eff) (x) I) - k_f I.
CMatrix build_liouvillian(const CMatrix& hamiltonian, const CMatrix& projector, double k_b,
                          double k_f, std::size_t dim_cap = kDefaultLiouvilleDimCap);

CVector vectorize(const CMatrix& m);
CMatrix unvectorize(const CVector& v, Eigen::Index dim);

}  // namespace rpzeno
