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

// Reference implementations used only by tests. Each one avoids the code
// path it checks: explicit loops instead of Kronecker helpers, a generic
// Runge-Kutta integrator instead of the eigenbasis solution, quadrature
// instead of closed-form spectral densities, and a dense resolvent instead
// of the eigenbasis relaxation assembly.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Angular momentum matrices from <m'|S+|m> = sqrt(s(s+1) - m(m+1)).
struct Spin {
  CMatrix x, y, z;
};
Spin spin(int multiplicity);

/// (A (x) B)_{(i k),(j l)} = A_ij B_kl by explicit index arithmetic.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// op at `slot`, identities elsewhere, built by nested loops over all sites.
CMatrix embed(const CMatrix& op, std::size_t slot, const std::vector<int>& dims);

/// Electron operators S_{e, axis} on the 4-dim pair space.
CMatrix pair_op(int electron, int axis);

/// Kets in the basis |uu>, |ud>, |du>, |dd>.
Eigen::Vector4cd ket_singlet();
Eigen::Vector4cd ket_t0();

/// exp(i a S1.S2) through a general matrix exponential.
CMatrix exchange_unitary(double a);

/// d rho/dt = -i (H_eff rho - rho H_eff^+) - k_f rho, evaluated directly.
CMatrix master_rhs(const CMatrix& heff, double k_f, const CMatrix& rho);

struct IntegratedYields {
  double phi_b = 0.0;
  double phi_f = 0.0;
  double final_trace = 0.0;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of the master equation,
/// carrying k_b Tr[P rho] and k_f Tr[rho] as extra state, until Tr rho falls
/// below `trace_floor`.
IntegratedYields integrate_yields(const CMatrix& h, const CMatrix& projector, double k_b,
                                  double k_f, const CMatrix& rho0, double tolerance = 1e-10,
                                  double trace_floor = 1e-9);

/// State at time t by the same integrator.
CMatrix integrate_state(const CMatrix& h, const CMatrix& projector, double k_b, double k_f,
                        const CMatrix& rho0, double t, double tolerance = 1e-10);

/// Integral over [0, inf) of variance exp(-t/tau_c) exp(i omega t), Gauss-Kronrod
/// panels over [0, 60 tau_c].
Complex spectral_density_quadrature(double omega, double variance, double tau_c);

/// -Sum_j variance Comm_j (I/tau_c - L)^-1 Comm_j with Comm_j = [A_j, .] for the
/// six electron spin components; L includes -k_f when `include_kf`. Column
/// stacked, dense.
CMatrix nz_superoperator(const CMatrix& heff, const std::vector<int>& dims, double variance,
                         double tau_c, double k_f, bool include_kf);

/// Column-stacked superoperator of rho -> A rho B, filled column by column.
CMatrix superop_left_right(const CMatrix& a, const CMatrix& b);

CMatrix random_hermitian(Eigen::Index d, std::mt19937_64& gen, double scale = 1.0);
CMatrix random_density(Eigen::Index d, std::mt19937_64& gen);

}  // namespace oracle
