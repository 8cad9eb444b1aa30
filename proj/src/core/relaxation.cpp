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

#include "core/relaxation.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "core/error.hpp"

namespace rpzeno {

namespace {

void check_cap(Eigen::Index d, std::size_t cap) {
  if (static_cast<std::size_t>(d) > cap)
    throw Error(ErrorKind::CapExceeded,
                "relaxation needs Liouville space with d <= " + std::to_string(cap) +
                    " (d = " + std::to_string(d) + ")");
}

// Accumulates -[A~, J o (A~ E_pq - E_pq A~^+)] for every basis element E_pq.
void accumulate_generator(const CMatrix& a, const CMatrix& j, CMatrix& r) {
  const Eigen::Index d = a.rows();
  const CMatrix a_conj = a.conjugate();
  CVector y(d), z(d), ay(d), cz(d);
  for (Eigen::Index q = 0; q < d; ++q) {
    for (Eigen::Index p = 0; p < d; ++p) {
      // Y = y e_q^T + e_p z^T
      for (Eigen::Index i = 0; i < d; ++i) {
        y(i) = j(i, q) * a(i, p);
        z(i) = -j(p, i) * a_conj(i, q);
      }
      ay.noalias() = a * y;
      cz.noalias() = a_conj * z;
      Eigen::Map<CMatrix> col(r.col(p + q * d).data(), d, d);
      // A~Y - Y A~^+ = (A~y) e_q^T + A~_{.p} z^T - y conj(A~_{.q})^T - e_p (conj(A~) z)^T
      col.col(q) -= ay;
      col.noalias() -= a.col(p) * z.transpose();
      col.noalias() += y * a_conj.col(q).transpose();
      col.row(p) += cz.transpose();
    }
  }
}

}  // namespace

void RelaxationSpec::validate() const {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw Error(ErrorKind::InvalidArgument, "relaxation rate must be finite and >= 0");
  if (!(tau_c > 0.0) || !std::isfinite(tau_c))
    throw Error(ErrorKind::InvalidArgument, "correlation time must be > 0");
}

Complex spectral_density(Complex omega, double variance, double tau_c) {
  return variance / (Complex(1.0 / tau_c, 0.0) - Complex(0.0, 1.0) * omega);
}

CMatrix nz_relaxation_eigenbasis(const EigenSystem& eig, const RelaxationSpec& relax,
                                 const SpinSystem& system, double k_f, std::size_t dim_cap) {
  relax.validate();
  const Eigen::Index d = eig.eigenvalues.size();
  if (static_cast<std::size_t>(d) != system.hilbert_dim())
    throw Error(ErrorKind::DimensionMismatch, "eigensystem does not match the spin system");
  check_cap(d, dim_cap);
  CMatrix r = CMatrix::Zero(d * d, d * d);
  if (!relax.active()) return r;

  const double shift = relax.kernel_includes_kf ? k_f : 0.0;
  CMatrix j(d, d);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = 0; n < d; ++n) {
      const Complex omega =
          -(eig.eigenvalues(m) - std::conj(eig.eigenvalues(n))) + Complex(0.0, shift);
      j(m, n) = spectral_density(omega, relax.variance(), relax.tau_c);
    }

  const auto& pair = electron_pair_operators();
  const std::size_t nuc = system.nuclear_dim();
  for (int axis = 0; axis < 3; ++axis) {
    for (const CMatrix* op : {&pair.s1[axis], &pair.s2[axis]}) {
      const CMatrix a_tilde = eig.inverse * extend_over_nuclei(*op, nuc) * eig.vectors;
      accumulate_generator(a_tilde, j, r);
    }
  }
  return r;
}

CMatrix nz_relaxation(const EigenSystem& eig, const RelaxationSpec& relax,
                      const SpinSystem& system, double k_f, std::size_t dim_cap) {
  const CMatrix r_tilde = nz_relaxation_eigenbasis(eig, relax, system, k_f, dim_cap);
  const Eigen::Index d = eig.eigenvalues.size();
  if (!relax.active()) return r_tilde;
  // vec(V X V^+) = (conj(V) (x) V) vec(X)
  const CMatrix to_standard_f[2] = {eig.vectors.conjugate(), eig.vectors};
  const CMatrix to_eigen_f[2] = {eig.inverse.conjugate(), eig.inverse};
  const CMatrix to_standard = kron_all(to_standard_f);
  const CMatrix to_eigen = kron_all(to_eigen_f);
  CMatrix r = to_standard * (r_tilde * to_eigen);
  (void)d;
  return r;
}

double yield_liouville(const CMatrix& total, const CMatrix& rho0, const CMatrix& projector,
                       double k_b) {
  const Eigen::Index d = rho0.rows();
  if (total.rows() != d * d || total.cols() != d * d || projector.rows() != d)
    throw Error(ErrorKind::DimensionMismatch, "Liouvillian, state and projector disagree");
  Eigen::PartialPivLU<CMatrix> lu(total);
  if (!(lu.rcond() > 1e-15))
    throw Error(ErrorKind::DivergentYield, "Liouvillian is singular (non-decaying dynamics)");
  const CVector x = lu.solve(vectorize(rho0));
  const CMatrix integrated = -unvectorize(x, d);
  return finalize_yield(k_b * (projector * integrated).trace(), "recombination yield");
}

double yield_relaxed(const EigenSystem& eig, const RelaxationSpec& relax,
                     const SpinSystem& system, const CMatrix& rho0, const CMatrix& projector,
                     double k_b, double k_f, std::size_t dim_cap) {
  const Eigen::Index d = eig.eigenvalues.size();
  CMatrix total = nz_relaxation_eigenbasis(eig, relax, system, k_f, dim_cap);
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index m = 0; m < d; ++m)
      total(m + n * d, m + n * d) -=
          k_f + Complex(0.0, 1.0) * (eig.eigenvalues(m) - std::conj(eig.eigenvalues(n)));
  Eigen::PartialPivLU<CMatrix> lu(total);
  if (!(lu.rcond() > 1e-15))
    throw Error(ErrorKind::DivergentYield, "Liouvillian is singular (non-decaying dynamics)");
  const CVector x = lu.solve(vectorize(to_eigenbasis(eig, rho0)));
  const CMatrix p_tilde = eig.vectors.adjoint() * projector * eig.vectors;
  const CMatrix integrated = -unvectorize(x, d);
  // tr[P V X V^+] = tr[(V^+ P V) X]
  return finalize_yield(k_b * (p_tilde * integrated).trace(), "recombination yield");
}

}  // namespace rpzeno
