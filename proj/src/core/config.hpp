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

// Run configuration: YAML text with explicit units on every physical
// quantity. The grammar is documented in README.md.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/ciss.hpp"
#include "core/observables.hpp"
#include "core/relaxation.hpp"
#include "core/sweep.hpp"

namespace rpzeno {

/// A rate, or an axis of rates / angles.
struct Sweepable {
  double value = 0.0;
  std::optional<AxisSpec> axis;
  bool operator==(const Sweepable&) const = default;
};

struct OrientationConfig {
  std::size_t count = 300;
  OrientationScheme scheme = OrientationScheme::Fibonacci;
  std::uint64_t seed = 1;
  bool operator==(const OrientationConfig&) const = default;
};

struct ObservablesConfig {
  std::vector<Partition> partitions{Partition::Local, Partition::Global};
  CoherenceQuadrature quadrature;
  bool sensitivity_percent = true;
  bool operator==(const ObservablesConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool svg = true;
  bool png = true;
  bool operator==(const OutputConfig&) const = default;
};

struct SeriesConfig {
  bool enabled = false;
  std::vector<std::string> order;
  bool operator==(const SeriesConfig&) const = default;
};

struct EigenConfig {
  std::vector<char> directions{'x', 'z'};
  bool operator==(const EigenConfig&) const = default;
};

struct LimitsConfig {
  double cell_budget_us = 60e6;  // wall clock per cell
  std::size_t relaxation_max_points = 40;
  std::size_t checkpoint_every = 8;
  bool operator==(const LimitsConfig&) const = default;
};

struct RunConfig {
  SpinSystem system;
  CissConfig ciss;
  std::optional<AxisSpec> chi_axis;
  Sweepable k_b{1e3, std::nullopt};
  Sweepable k_f{1.0, std::nullopt};
  RelaxationSpec relaxation;
  OrientationConfig orientations;
  ObservablesConfig observables;
  OutputConfig output;
  SeriesConfig series;
  EigenConfig eigen;
  LimitsConfig limits;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Throws ErrorKind::Config; messages carry "line L, column C" and the key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Fully explicit YAML in base units (mT, us^-1, us, nm, rad), 17
/// significant digits. Reparses to an equal RunConfig.
std::string canonical_config(const RunConfig& config, bool include_output = true);

/// SHA-256 (hex) of the canonical text without the output block.
std::string config_hash(const RunConfig& config);

/// "k_b=log:1e-3:1e6:50,k_f=1" (base units). Each entry either sets an axis
/// (scale:min:max:points) or fixes the value.
void apply_grid_override(RunConfig& config, const std::string& spec);

/// Grid axes in the order chi, k_b, k_f.
SweepGrid sweep_grid(const RunConfig& config);

SweepInputs sweep_inputs(const RunConfig& config);

OrientationSet config_orientations(const RunConfig& config);

/// Parses "<number> <unit>" for a quantity kind; exposed for tests.
enum class QuantityKind { Field, Rate, Time, Length, Angle, Gyromagnetic };
double parse_quantity(const std::string& text, QuantityKind kind);

}  // namespace rpzeno
