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

#include "core/spin_core.hpp"

#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace rpzeno {

namespace {

constexpr double kMu0Over4Pi = 1.00000000055e-7;      // T^2 m^3 J^-1
constexpr double kElectronG = 2.00231930436256;
constexpr double kBohrMagneton = 9.2740100783e-24;    // J/T
constexpr double kHbar = 1.054571817e-34;             // J s

bool is_rotation(const Mat3& r) {
  const double orth = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orth <= 1e-12 && std::abs(r.determinant() - 1.0) <= 1e-12;
}

bool all_finite(const Mat3& m) { return m.allFinite(); }

// Sum_ab S1_a T_ab S2_b on the full space.
CMatrix bilinear_electron_coupling(const Mat3& tensor, std::size_t nuclear_dim) {
  const auto& ops = electron_pair_operators();
  CMatrix pair = CMatrix::Zero(4, 4);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (tensor(a, b) != 0.0) pair += tensor(a, b) * (ops.s1[a] * ops.s2[b]);
  return extend_over_nuclei(pair, nuclear_dim);
}

}  // namespace

double dipolar_coefficient(double distance_nm) {
  if (!(distance_nm > 0.0) || !std::isfinite(distance_nm))
    throw Error(ErrorKind::InvalidArgument, "dipolar distance must be positive and finite");
  const double r = distance_nm * 1e-9;
  const double per_second =
      kMu0Over4Pi * kElectronG * kElectronG * kBohrMagneton * kBohrMagneton / (kHbar * r * r * r);
  return per_second * 1e-6;
}

DipolarSpec DipolarSpec::from_axis(double distance_nm, const Vec3& axis) {
  const double n = axis.norm();
  if (!(n > 0.0) || !axis.allFinite())
    throw Error(ErrorKind::InvalidArgument, "dipolar axis must be a non-zero finite vector");
  DipolarSpec spec;
  spec.mode = Mode::Axis;
  spec.distance_nm = distance_nm;
  spec.axis = axis / n;
  spec.validate();
  return spec;
}

DipolarSpec DipolarSpec::from_tensor(const Mat3& tensor_mT, bool point_dipole) {
  DipolarSpec spec;
  spec.mode = Mode::Tensor;
  spec.tensor_mT = tensor_mT;
  spec.point_dipole = point_dipole;
  spec.validate();
  return spec;
}

void DipolarSpec::validate() const {
  switch (mode) {
    case Mode::None:
      return;
    case Mode::Axis:
      if (!(distance_nm > 0.0) || !std::isfinite(distance_nm))
        throw Error(ErrorKind::InvalidArgument, "dipolar distance must be positive");
      if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "dipolar axis must be a unit vector");
      return;
    case Mode::Tensor:
      if (!all_finite(tensor_mT))
        throw Error(ErrorKind::InvalidArgument, "dipolar tensor has non-finite entries");
      if (point_dipole) {
        const double asym = (tensor_mT - tensor_mT.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-10 || std::abs(tensor_mT.trace()) > 1e-10)
          throw Error(ErrorKind::InvalidArgument,
                      "point-dipole tensor must be symmetric and traceless "
                      "(flag it as non-point-dipole otherwise)");
      }
      return;
  }
}

std::vector<int> SpinSystem::dims() const {
  std::vector<int> d{2, 2};
  for (const auto& n : radical_a_nuclei) d.push_back(n.multiplicity);
  for (const auto& n : radical_b_nuclei) d.push_back(n.multiplicity);
  return d;
}

std::size_t SpinSystem::nuclear_dim() const {
  std::size_t m = 1;
  for (const auto& n : radical_a_nuclei) m *= static_cast<std::size_t>(n.multiplicity);
  for (const auto& n : radical_b_nuclei) m *= static_cast<std::size_t>(n.multiplicity);
  return m;
}

std::size_t SpinSystem::hilbert_dim() const { return 4 * nuclear_dim(); }

void SpinSystem::validate() const {
  auto check_nucleus = [](const NucleusSpec& n) {
    if (n.multiplicity < 2)
      throw Error(ErrorKind::InvalidArgument,
                  "nucleus '" + n.label + "': multiplicity must be >= 2");
    if (!all_finite(n.hyperfine_mT))
      throw Error(ErrorKind::InvalidArgument,
                  "nucleus '" + n.label + "': hyperfine tensor has non-finite entries");
    if (!is_rotation(n.rotation))
      throw Error(ErrorKind::InvalidArgument,
                  "nucleus '" + n.label + "': rotation is not a proper rotation");
  };
  for (const auto& n : radical_a_nuclei) check_nucleus(n);
  for (const auto& n : radical_b_nuclei) check_nucleus(n);
  dipolar.validate();
  if (!(field_mT >= 0.0) || !std::isfinite(field_mT))
    throw Error(ErrorKind::InvalidArgument, "field magnitude must be finite and >= 0");
  if (!std::isfinite(gyromagnetic_ratio) || !std::isfinite(gamma_b()))
    throw Error(ErrorKind::InvalidArgument, "gyromagnetic ratio must be finite");
  if (!is_rotation(frame_rotation))
    throw Error(ErrorKind::InvalidArgument,
                "frame_rotation must be orthogonal with determinant +1 (tolerance 1e-12)");
}

SpinOperators spin_operators(int multiplicity) {
  if (multiplicity < 2)
    throw Error(ErrorKind::InvalidArgument, "spin multiplicity must be >= 2");
  const int m = multiplicity;
  const double s = 0.5 * (m - 1);
  SpinOperators ops{CMatrix::Zero(m, m), CMatrix::Zero(m, m), CMatrix::Zero(m, m)};
  // Basis |s, s>, |s, s-1>, ..., |s, -s>.
  for (int i = 0; i < m; ++i) {
    const double mi = s - i;
    ops.z(i, i) = mi;
    if (i + 1 < m) {
      // <m+1| S+ |m> between row i (m_i) and column i+1 (m_i - 1).
      const double mj = mi - 1.0;
      const double c = std::sqrt(s * (s + 1.0) - mj * (mj + 1.0));
      ops.x(i, i + 1) = 0.5 * c;
      ops.x(i + 1, i) = 0.5 * c;
      ops.y(i, i + 1) = Complex(0.0, -0.5 * c);
      ops.y(i + 1, i) = Complex(0.0, 0.5 * c);
    }
  }
  return ops;
}

CMatrix kron_all(std::span<const CMatrix> factors) {
  CMatrix result = CMatrix::Identity(1, 1);
  for (const auto& f : factors) {
    const Eigen::Index r = result.rows(), fr = f.rows();
    CMatrix next = CMatrix::Zero(r * fr, r * fr);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j) {
        const Complex v = result(i, j);
        if (v != Complex(0.0, 0.0)) next.block(i * fr, j * fr, fr, fr) = v * f;
      }
    result = std::move(next);
  }
  return result;
}

CMatrix embed(const CMatrix& op, std::size_t slot, std::span<const int> dims) {
  if (slot >= dims.size())
    throw Error(ErrorKind::InvalidArgument, "embed: slot index out of range");
  if (op.rows() != op.cols() || op.rows() != dims[slot])
    throw Error(ErrorKind::DimensionMismatch, "embed: operator dimension does not match site");
  const auto left = std::accumulate(dims.begin(), dims.begin() + static_cast<long>(slot),
                                    Eigen::Index{1}, std::multiplies<>());
  const auto right = std::accumulate(dims.begin() + static_cast<long>(slot) + 1, dims.end(),
                                     Eigen::Index{1}, std::multiplies<>());
  const Eigen::Index m = op.rows();
  const Eigen::Index n = left * m * right;
  CMatrix out = CMatrix::Zero(n, n);
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        const Complex v = op(a, b);
        if (v == Complex(0.0, 0.0)) continue;
        const Eigen::Index row0 = (l * m + a) * right;
        const Eigen::Index col0 = (l * m + b) * right;
        for (Eigen::Index r = 0; r < right; ++r) out(row0 + r, col0 + r) = v;
      }
  return out;
}

Vec3 field_vector(const Orientation& o, double magnitude) {
  const double st = std::sin(o.theta);
  return magnitude * Vec3(st * std::cos(o.phi), st * std::sin(o.phi), std::cos(o.theta));
}

const ElectronPairOperators& electron_pair_operators() {
  static const ElectronPairOperators ops = [] {
    ElectronPairOperators out;
    const auto s = spin_operators(2);
    const CMatrix id = CMatrix::Identity(2, 2);
    const CMatrix* comps[3] = {&s.x, &s.y, &s.z};
    for (int a = 0; a < 3; ++a) {
      const CMatrix f1[2] = {*comps[a], id};
      const CMatrix f2[2] = {id, *comps[a]};
      out.s1[a] = kron_all(f1);
      out.s2[a] = kron_all(f2);
    }
    return out;
  }();
  return ops;
}

CMatrix extend_over_nuclei(const CMatrix& electron_op, std::size_t nuclear_dim) {
  if (nuclear_dim == 1) return electron_op;
  const CMatrix factors[2] = {electron_op,
                              CMatrix::Identity(static_cast<Eigen::Index>(nuclear_dim),
                                                static_cast<Eigen::Index>(nuclear_dim))};
  return kron_all(factors);
}

CMatrix build_zeeman(const SpinSystem& system, const Vec3& field_mT) {
  if (!field_mT.allFinite())
    throw Error(ErrorKind::InvalidArgument, "Zeeman: field vector must be finite");
  const auto& ops = electron_pair_operators();
  CMatrix pair = CMatrix::Zero(4, 4);
  for (int a = 0; a < 3; ++a)
    pair -= field_mT(a) * (system.gamma_a() * ops.s1[a] + system.gamma_b() * ops.s2[a]);
  return extend_over_nuclei(pair, system.nuclear_dim());
}

CMatrix build_hyperfine(const SpinSystem& system) {
  const auto dims = system.dims();
  const std::size_t d = system.hilbert_dim();
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const double to_rad = std::abs(system.gyromagnetic_ratio);
  const auto& single = spin_operators(2);
  const CMatrix* s_comp[3] = {&single.x, &single.y, &single.z};

  std::size_t slot = 2;
  auto add_radical = [&](const std::vector<NucleusSpec>& nuclei, int electron) {
    for (const auto& n : nuclei) {
      const Mat3 a = to_rad * (system.frame_rotation * n.rotation * n.hyperfine_mT *
                               n.rotation.transpose() * system.frame_rotation.transpose());
      const auto iops = spin_operators(n.multiplicity);
      const CMatrix* i_comp[3] = {&iops.x, &iops.y, &iops.z};
      for (int row = 0; row < 3; ++row) {
        // I_row * sum_col A(row, col) S_col
        CMatrix t = CMatrix::Zero(2, 2);
        for (int col = 0; col < 3; ++col) t += a(row, col) * *s_comp[col];
        if (t.cwiseAbs().maxCoeff() == 0.0) continue;
        std::vector<CMatrix> factors;
        factors.reserve(dims.size());
        for (std::size_t k = 0; k < dims.size(); ++k) {
          if (k == static_cast<std::size_t>(electron)) factors.push_back(t);
          else if (k == slot) factors.push_back(*i_comp[row]);
          else factors.push_back(CMatrix::Identity(dims[k], dims[k]));
        }
        h += kron_all(factors);
      }
      ++slot;
    }
  };
  add_radical(system.radical_a_nuclei, 0);
  add_radical(system.radical_b_nuclei, 1);
  return h;
}

CMatrix build_eed(const SpinSystem& system) {
  const auto& dip = system.dipolar;
  dip.validate();
  Mat3 coupling = Mat3::Zero();
  switch (dip.mode) {
    case DipolarSpec::Mode::None:
      break;
    case DipolarSpec::Mode::Axis: {
      const Vec3 u = system.frame_rotation * dip.axis;
      const double d = dipolar_coefficient(dip.distance_nm);
      // -d (3 (S1.u)(S2.u) - S1.S2) = S1 . [-d (3 u u^T - 1)] . S2
      coupling = -d * (3.0 * u * u.transpose() - Mat3::Identity());
      break;
    }
    case DipolarSpec::Mode::Tensor:
      coupling = std::abs(system.gyromagnetic_ratio) *
                 (system.frame_rotation * dip.tensor_mT * system.frame_rotation.transpose());
      break;
  }
  return bilinear_electron_coupling(coupling, system.nuclear_dim());
}

CMatrix singlet_projector(const SpinSystem& system) {
  const auto& ops = electron_pair_operators();
  CMatrix ps = 0.25 * CMatrix::Identity(4, 4);
  for (int a = 0; a < 3; ++a) ps -= ops.s1[a] * ops.s2[a];
  return extend_over_nuclei(ps, system.nuclear_dim());
}

CMatrix triplet_projector(const SpinSystem& system) {
  const std::size_t d = system.hilbert_dim();
  return CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) -
         singlet_projector(system);
}

HamiltonianBuilder::HamiltonianBuilder(const SpinSystem& system)
    : gamma_a_(system.gamma_a()), gamma_b_(system.gamma_b()), field_mT_(system.field_mT) {
  system.validate();
  static_part_ = build_hyperfine(system) + build_eed(system);
  const auto& ops = electron_pair_operators();
  const std::size_t m = system.nuclear_dim();
  for (int a = 0; a < 3; ++a) {
    electron_ops_[0][a] = extend_over_nuclei(ops.s1[a], m);
    electron_ops_[1][a] = extend_over_nuclei(ops.s2[a], m);
  }
}

CMatrix HamiltonianBuilder::zeeman(const Vec3& field_mT) const {
  CMatrix h = CMatrix::Zero(static_part_.rows(), static_part_.cols());
  for (int a = 0; a < 3; ++a) {
    if (field_mT(a) == 0.0) continue;
    h -= (gamma_a_ * field_mT(a)) * electron_ops_[0][a];
    h -= (gamma_b_ * field_mT(a)) * electron_ops_[1][a];
  }
  return h;
}

CMatrix HamiltonianBuilder::hamiltonian(const Vec3& field_mT) const {
  return static_part_ + zeeman(field_mT);
}

CMatrix HamiltonianBuilder::hamiltonian(const Orientation& orientation) const {
  return hamiltonian(field_vector(orientation, field_mT_));
}

}  // namespace rpzeno
