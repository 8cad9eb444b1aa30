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

// Spin operators, composite-space embedding and the coherent radical-pair
// Hamiltonian (Zeeman, hyperfine, electron-electron dipolar).
//
// Site order is fixed: electron 1, electron 2, nuclei of radical A in listed
// order, nuclei of radical B in listed order. The first site is the most
// significant index of the Kronecker product.
//
// Units: magnetic quantities in mT, angular frequencies in rad/us, time in us.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rpzeno {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Electron gyromagnetic ratio in rad us^-1 mT^-1 (negative: the electron
/// magnetic moment is antiparallel to its spin).
inline constexpr double kElectronGyromagneticRatio = -176.085963023;

/// Point-dipole coupling d(r) = mu0 g^2 muB^2 / (4 pi hbar r^3) in rad/us for
/// a distance in nm.
double dipolar_coefficient(double distance_nm);

struct NucleusSpec {
  std::string label;
  int multiplicity = 2;
  Mat3 hyperfine_mT = Mat3::Zero();
  // Maps the nucleus' own tensor frame into the molecular frame.
  Mat3 rotation = Mat3::Identity();

  bool operator==(const NucleusSpec&) const = default;
};

struct DipolarSpec {
  enum class Mode { None, Axis, Tensor };

  Mode mode = Mode::None;
  double distance_nm = 0.0;
  Vec3 axis = Vec3::UnitZ();
  Mat3 tensor_mT = Mat3::Zero();
  bool point_dipole = true;

  static DipolarSpec none() { return {}; }
  static DipolarSpec from_axis(double distance_nm, const Vec3& axis);
  static DipolarSpec from_tensor(const Mat3& tensor_mT, bool point_dipole = true);

  void validate() const;
  bool operator==(const DipolarSpec&) const = default;
};

struct Orientation {
  double theta = 0.0;
  double phi = 0.0;

  bool operator==(const Orientation&) const = default;
};

struct SpinSystem {
  std::vector<NucleusSpec> radical_a_nuclei;
  std::vector<NucleusSpec> radical_b_nuclei;
  DipolarSpec dipolar;
  double field_mT = 0.05;
  double gyromagnetic_ratio = kElectronGyromagneticRatio;
  // Electron 2 scalar; equal to gyromagnetic_ratio when unset.
  std::optional<double> gyromagnetic_ratio_b;
  // Molecular frame -> CISS quantization frame (z = polarization axis).
  Mat3 frame_rotation = Mat3::Identity();

  /// Site multiplicities in canonical order.
  std::vector<int> dims() const;
  std::size_t hilbert_dim() const;
  std::size_t nuclear_dim() const;
  std::size_t nucleus_count() const {
    return radical_a_nuclei.size() + radical_b_nuclei.size();
  }
  double gamma_a() const { return gyromagnetic_ratio; }
  double gamma_b() const { return gyromagnetic_ratio_b.value_or(gyromagnetic_ratio); }

  void validate() const;
  bool operator==(const SpinSystem&) const = default;
};

struct SpinOperators {
  CMatrix x, y, z;
};

SpinOperators spin_operators(int multiplicity);

/// Kronecker product of per-site factors, first factor most significant.
CMatrix kron_all(std::span<const CMatrix> factors);

/// I (x) ... (x) op (x) ... (x) I with op at `slot`.
CMatrix embed(const CMatrix& op, std::size_t slot, std::span<const int> dims);

/// B = magnitude (sin t cos p, sin t sin p, cos t) in the CISS frame.
Vec3 field_vector(const Orientation& orientation, double magnitude);

CMatrix build_zeeman(const SpinSystem& system, const Vec3& field_mT);
CMatrix build_hyperfine(const SpinSystem& system);
CMatrix build_eed(const SpinSystem& system);

CMatrix singlet_projector(const SpinSystem& system);
CMatrix triplet_projector(const SpinSystem& system);

/// 4x4 electron-pair operators, site order (electron 1, electron 2).
struct ElectronPairOperators {
  CMatrix s1[3];
  CMatrix s2[3];
};
const ElectronPairOperators& electron_pair_operators();

/// Electron-space 4x4 operator extended over the nuclear identity.
CMatrix extend_over_nuclei(const CMatrix& electron_op, std::size_t nuclear_dim);

/// Field-independent part of H and the embedded electron spin operators, so
/// the Zeeman term can be added per orientation without rebuilding.
class HamiltonianBuilder {
 public:
  explicit HamiltonianBuilder(const SpinSystem& system);

  std::size_t dim() const { return static_cast<std::size_t>(static_part_.rows()); }
  const CMatrix& static_part() const { return static_part_; }
  /// Embedded S_{electron, axis}; electron in {0, 1}, axis in {0, 1, 2}.
  const CMatrix& electron_operator(int electron, int axis) const {
    return electron_ops_[electron][axis];
  }

  CMatrix zeeman(const Vec3& field_mT) const;
  CMatrix hamiltonian(const Vec3& field_mT) const;
  CMatrix hamiltonian(const Orientation& orientation) const;

 private:
  double gamma_a_;
  double gamma_b_;
  double field_mT_;
  CMatrix static_part_;
  CMatrix electron_ops_[2][3];
};

}  // namespace rpzeno
