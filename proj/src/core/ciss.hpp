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

// Chirality-modified initial states and recombination projectors.
//
// CISP: spin-polarizing model. Formation uses P_{-chi}, recombination P_{+chi}.
// CISC: coherence-only model with theta = chi / 2.
// Channel: phase rotation on electron 1 followed by exchange evolution; j
// interpolates between CISC (j = 0) and CISP (j = pi/8).
//
// All 4x4 operators use the electron basis |uu>, |ud>, |du>, |dd>.

#include <numbers>
#include <string_view>

#include "core/spin_core.hpp"

namespace rpzeno {

enum class CissModel { None, Cisp, Cisc, Channel };
enum class Precursor { Singlet, Triplet };

std::string_view to_string(CissModel model);
std::string_view to_string(Precursor precursor);

struct CissConfig {
  CissModel model = CissModel::None;
  double chi = 0.0;  // rad; CISC reads it as chi = 2 theta
  double channel_j = std::numbers::pi / 8.0;
  Precursor precursor = Precursor::Singlet;

  void validate() const;
  bool operator==(const CissConfig&) const = default;
};

/// Density operator on the joint electron-nuclear space, Zeeman product basis.
struct DensityOperator {
  CMatrix matrix;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  Complex trace() const { return matrix.trace(); }
};

CMatrix cisp_projector(double chi);
CMatrix cisc_projector(double theta);

/// Pure channel image of the singlet, U_ex W |S><S| W^+ U_ex^+.
CMatrix channel_singlet_projector(double chi, double j);

/// Channel applied to the singlet (P_S / M) or unpolarized triplet
/// (P_T / 3M) precursor, extended over the nuclear identity.
DensityOperator channel_state(Precursor precursor, double chi, double j,
                              std::size_t nuclear_dim);

/// Electron-space (4x4) formation projector selected by the model.
CMatrix formation_projector(const CissConfig& config);
/// Electron-space (4x4) recombination projector selected by the model.
CMatrix recombination_electron_projector(const CissConfig& config);

DensityOperator initial_state(const CissConfig& config, const SpinSystem& system);
CMatrix recombination_projector(const CissConfig& config, const SpinSystem& system);

}  // namespace rpzeno
