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

#include "core/ciss.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "core/error.hpp"

namespace rpzeno {

namespace {

using Vec4c = Eigen::Vector4cd;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Vec4c singlet_ket() { return Vec4c(0.0, kInvSqrt2, -kInvSqrt2, 0.0); }
Vec4c t0_ket() { return Vec4c(0.0, kInvSqrt2, kInvSqrt2, 0.0); }

CMatrix outer(const Vec4c& v) { return v * v.adjoint(); }

CMatrix electron_singlet() { return outer(singlet_ket()); }

// exp(i 4 j S1.S2): S1.S2 = 1/4 on the triplet, -3/4 on the singlet.
CMatrix exchange_unitary(double j) {
  const CMatrix ps = electron_singlet();
  const CMatrix pt = CMatrix::Identity(4, 4) - ps;
  return std::polar(1.0, j) * pt + std::polar(1.0, -3.0 * j) * ps;
}

// Phase rotation |u><u| e^{i chi} + |d><d| on electron 1.
CMatrix phase_rotation(double chi) {
  CMatrix w = CMatrix::Identity(4, 4);
  w(0, 0) = std::polar(1.0, chi);
  w(1, 1) = std::polar(1.0, chi);
  return w;
}

CMatrix apply_channel(const CMatrix& rho, double chi, double j) {
  const CMatrix k = exchange_unitary(j) * phase_rotation(chi);
  return k * rho * k.adjoint();
}

}  // namespace

std::string_view to_string(CissModel model) {
  switch (model) {
    case CissModel::None: return "none";
    case CissModel::Cisp: return "cisp";
    case CissModel::Cisc: return "cisc";
    case CissModel::Channel: return "channel";
  }
  return "none";
}

std::string_view to_string(Precursor precursor) {
  return precursor == Precursor::Singlet ? "singlet" : "triplet";
}

void CissConfig::validate() const {
  if (!std::isfinite(chi) || !std::isfinite(channel_j))
    throw Error(ErrorKind::InvalidArgument, "CISS angles must be finite");
  if (chi < -std::numbers::pi / 2.0 - 1e-12 || chi > std::numbers::pi / 2.0 + 1e-12)
    throw Error(ErrorKind::InvalidArgument, "chi must lie in [-pi/2, pi/2]");
}

CMatrix cisp_projector(double chi) {
  const Vec4c psi = std::cos(0.5 * chi) * singlet_ket() + std::sin(0.5 * chi) * t0_ket();
  return outer(psi);
}

CMatrix cisc_projector(double theta) {
  const Vec4c psi = std::cos(theta) * singlet_ket() +
                    Complex(0.0, std::sin(theta)) * t0_ket();
  return outer(psi);
}

CMatrix channel_singlet_projector(double chi, double j) {
  return apply_channel(electron_singlet(), chi, j);
}

DensityOperator channel_state(Precursor precursor, double chi, double j,
                              std::size_t nuclear_dim) {
  if (nuclear_dim < 1)
    throw Error(ErrorKind::InvalidArgument, "nuclear dimension must be >= 1");
  const CMatrix ps = electron_singlet();
  const CMatrix start =
      precursor == Precursor::Singlet ? ps : (CMatrix::Identity(4, 4) - ps) / 3.0;
  const CMatrix electron = apply_channel(start, chi, j);
  return {extend_over_nuclei(electron, nuclear_dim) / static_cast<double>(nuclear_dim)};
}

CMatrix formation_projector(const CissConfig& c) {
  switch (c.model) {
    case CissModel::None: return electron_singlet();
    case CissModel::Cisp: return cisp_projector(-c.chi);
    case CissModel::Cisc: return cisc_projector(0.5 * c.chi);
    case CissModel::Channel: return channel_singlet_projector(c.chi, c.channel_j);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown CISS model");
}

CMatrix recombination_electron_projector(const CissConfig& c) {
  switch (c.model) {
    case CissModel::None: return electron_singlet();
    case CissModel::Cisp: return cisp_projector(c.chi);
    case CissModel::Cisc: return cisc_projector(0.5 * c.chi);
    // Reverse traversal: electron exchange plus time reversal of the
    // formation projector, equivalently j -> -j.
    case CissModel::Channel: return channel_singlet_projector(c.chi, -c.channel_j);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown CISS model");
}

DensityOperator initial_state(const CissConfig& config, const SpinSystem& system) {
  config.validate();
  const std::size_t m = system.nuclear_dim();
  if (config.model == CissModel::Channel)
    return channel_state(config.precursor, config.chi, config.channel_j, m);
  const CMatrix formed = formation_projector(config);
  const CMatrix electron = config.precursor == Precursor::Singlet
                               ? formed
                               : (CMatrix::Identity(4, 4) - formed) / 3.0;
  return {extend_over_nuclei(electron, m) / static_cast<double>(m)};
}

CMatrix recombination_projector(const CissConfig& config, const SpinSystem& system) {
  config.validate();
  return extend_over_nuclei(recombination_electron_projector(config), system.nuclear_dim());
}

}  // namespace rpzeno
