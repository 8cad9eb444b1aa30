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

#include "core/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "core/error.hpp"

namespace rpzeno {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square");
}

double norm1(const CMatrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

EffectiveHamiltonian effective_hamiltonian(const CMatrix& hamiltonian, const CMatrix& projector,
                                           double k_b) {
  require_square(hamiltonian, "Hamiltonian");
  if (projector.rows() != hamiltonian.rows() || projector.cols() != hamiltonian.cols())
    throw Error(ErrorKind::DimensionMismatch, "projector and Hamiltonian dimensions differ");
  if (!(k_b >= 0.0) || !std::isfinite(k_b))
    throw Error(ErrorKind::InvalidArgument, "k_b must be finite and >= 0");
  EffectiveHamiltonian heff;
  heff.matrix = hamiltonian - Complex(0.0, 0.5 * k_b) * projector;
  heff.hamiltonian = hamiltonian;
  heff.projector = projector;
  heff.k_b = k_b;
  return heff;
}

EigenSystem eigendecompose(const EffectiveHamiltonian& heff, const EigenOptions& options) {
  const Eigen::Index d = heff.matrix.rows();
  EigenSystem out;
  CVector values;
  CMatrix vectors;
  if (heff.k_b == 0.0) {
    // Hermitian limit: unitary eigenvectors.
    const CMatrix herm = 0.5 * (heff.matrix + heff.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::DegenerateDecomposition, "Hermitian eigensolver failed");
    values = solver.eigenvalues().cast<Complex>();
    vectors = solver.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<CMatrix> solver(heff.matrix, true);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::DegenerateDecomposition, "complex eigensolver did not converge");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });
  out.eigenvalues.resize(d);
  out.vectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

  if (heff.k_b == 0.0) {
    out.inverse = out.vectors.adjoint();
  } else {
    Eigen::PartialPivLU<CMatrix> lu(out.vectors);
    out.inverse = lu.inverse();
  }
  out.condition = norm1(out.vectors) * norm1(out.inverse);
  if (!std::isfinite(out.condition) || out.condition > options.condition_limit)
    throw Error(ErrorKind::DegenerateDecomposition,
                "eigenvector matrix is ill-conditioned (condition estimate " +
                    std::to_string(out.condition) + ")");
  return out;
}

EigenSystem eigendecompose_with_fallback(const CMatrix& hamiltonian, const CMatrix& projector,
                                         double k_b, bool* perturbed,
                                         const EigenOptions& options) {
  if (perturbed) *perturbed = false;
  try {
    return eigendecompose(effective_hamiltonian(hamiltonian, projector, k_b), options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateDecomposition || k_b == 0.0) throw;
  }
  if (perturbed) *perturbed = true;
  return eigendecompose(effective_hamiltonian(hamiltonian, projector, k_b * (1.0 + 1e-9)),
                        options);
}

CMatrix to_eigenbasis(const EigenSystem& eig, const CMatrix& rho) {
  return eig.inverse * rho * eig.inverse.adjoint();
}

YieldKernel::YieldKernel(const EigenSystem& eig, const CMatrix& rho0, const CMatrix& observable) {
  const Eigen::Index d = eig.eigenvalues.size();
  if (rho0.rows() != d || observable.rows() != d)
    throw Error(ErrorKind::DimensionMismatch, "state/observable dimension differs from H_eff");
  const CMatrix rho_t = to_eigenbasis(eig, rho0);
  const CMatrix obs_t = eig.vectors.adjoint() * observable * eig.vectors;
  weights_.reserve(static_cast<std::size_t>(d * d));
  rates_.reserve(static_cast<std::size_t>(d * d));
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index m = 0; m < d; ++m) {
      weights_.push_back(rho_t(m, n) * obs_t(n, m));
      rates_.push_back(Complex(0.0, 1.0) *
                       (eig.eigenvalues(m) - std::conj(eig.eigenvalues(n))));
    }
}

Complex YieldKernel::integral(double k_f) const {
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const Complex denom = k_f + rates_[i];
    if (std::abs(denom) < 1e-13) {
      if (std::abs(weights_[i]) > 1e-14)
        throw Error(ErrorKind::DivergentYield,
                    "non-decaying component overlaps the initial state (k_f = 0?)");
      continue;
    }
    sum += weights_[i] / denom;
  }
  return sum;
}

double finalize_yield(Complex raw, const char* what) {
  if (!std::isfinite(raw.real()) || !std::isfinite(raw.imag()))
    throw Error(ErrorKind::DivergentYield, std::string(what) + " is not finite");
  if (std::abs(raw.imag()) > 1e-8)
    throw Error(ErrorKind::InvalidState,
                std::string(what) + " has imaginary residue " + std::to_string(raw.imag()));
  const double v = raw.real();
  if (v < -1e-8 || v > 1.0 + 1e-8)
    throw Error(ErrorKind::InvalidState,
                std::string(what) + " outside [0, 1]: " + std::to_string(v));
  return std::clamp(v, 0.0, 1.0);
}

double yield_closed_form(const EigenSystem& eig, const CMatrix& rho0, const CMatrix& projector,
                         double k_b, double k_f) {
  if (!(k_f >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "k_f must be >= 0");
  const YieldKernel kernel(eig, rho0, projector);
  return finalize_yield(k_b * kernel.integral(k_f), "recombination yield");
}

CMatrix evolve(const EigenSystem& eig, const CMatrix& rho0_tilde, double k_f, double t) {
  const Eigen::Index d = eig.eigenvalues.size();
  CMatrix x(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    const Complex right = std::exp(Complex(0.0, 1.0) * std::conj(eig.eigenvalues(n)) * t);
    for (Eigen::Index m = 0; m < d; ++m) {
      const Complex left = std::exp(Complex(0.0, -1.0) * eig.eigenvalues(m) * t);
      x(m, n) = rho0_tilde(m, n) * left * right;
    }
  }
  return std::exp(-k_f * t) * (eig.vectors * x * eig.vectors.adjoint());
}

std::vector<DensityOperator> trajectory(const EigenSystem& eig, const CMatrix& rho0, double k_f,
                                        std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "trajectory times must be sorted and >= 0");
  }
  const CMatrix rho_t = to_eigenbasis(eig, rho0);
  std::vector<DensityOperator> out;
  out.reserve(times.size());
  for (const double t : times) {
    if (t == 0.0) out.push_back({rho0});
    else out.push_back({evolve(eig, rho_t, k_f, t)});
  }
  return out;
}

CVector vectorize(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvectorize(const CVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim)
    throw Error(ErrorKind::DimensionMismatch, "vector length is not dim^2");
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

CMatrix build_liouvillian(const CMatrix& hamiltonian, const CMatrix& projector, double k_b,
                          double k_f, std::size_t dim_cap) {
  const auto heff = effective_hamiltonian(hamiltonian, projector, k_b);
  const Eigen::Index d = heff.matrix.rows();
  if (static_cast<std::size_t>(d) > dim_cap)
    throw Error(ErrorKind::CapExceeded,
                "Liouville space needs d <= " + std::to_string(dim_cap) + " (d = " +
                    std::to_string(d) + ")");
  const Eigen::Index n = d * d;
  CMatrix l = CMatrix::Zero(n, n);
  const CMatrix& h = heff.matrix;
  // I (x) H: block (b, b) = H
  for (Eigen::Index b = 0; b < d; ++b) l.block(b * d, b * d, d, d) = Complex(0.0, -1.0) * h;
  // conj(H) (x) I: block (a, b) = conj(H_ab) I
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      const Complex v = Complex(0.0, 1.0) * std::conj(h(a, b));
      if (v == Complex(0.0, 0.0)) continue;
      for (Eigen::Index i = 0; i < d; ++i) l(a * d + i, b * d + i) += v;
    }
  l.diagonal().array() -= k_f;
  return l;
}

}  // namespace rpzeno
