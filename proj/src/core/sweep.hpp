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

// Parameter sweeps over (k_b, k_f, chi) with orientation averaging.
//
// Work is scheduled in units of one (chi, k_b) pair. A unit diagonalizes
// H_eff once per orientation and evaluates every k_f value from the same
// eigensystem, so the eigensolver count is orientations x |k_b| x |chi|.

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "core/ciss.hpp"
#include "core/dynamics.hpp"
#include "core/observables.hpp"
#include "core/relaxation.hpp"

namespace rpzeno {

enum class AxisName { KB, KF, Chi };
enum class AxisScale { Log, Linear };

std::string_view to_string(AxisName name);
std::string_view to_string(AxisScale scale);

struct AxisSpec {
  AxisName name = AxisName::KB;
  AxisScale scale = AxisScale::Log;
  double min = 1e-3;
  double max = 1e6;
  std::size_t points = 200;

  void validate() const;
  /// Grid values; endpoints are exact.
  std::vector<double> values() const;
  bool operator==(const AxisSpec&) const = default;
};

struct SweepGrid {
  std::vector<AxisSpec> axes;  // zero, one or two distinct axes; first is slowest
  // Fixed values for rates that are not axes; a fixed chi comes from the
  // CISS config.
  double k_b = 1e3;
  double k_f = 1.0;
  // With relaxation active, axes are thinned to this many points (0 = off).
  std::size_t relaxation_max_points = 40;

  void validate() const;
  const AxisSpec* axis(AxisName name) const;
  bool operator==(const SweepGrid&) const = default;
};

struct SweepInputs {
  SpinSystem system;
  CissConfig ciss;
  RelaxationSpec relaxation;
  OrientationSet orientations;
  SweepGrid grid;
};

struct CellResult {
  double delta_phi = 0.0;
  double mean_phi = 0.0;
  double sensitivity = 0.0;
  double max_phi = 0.0;
  double min_phi = 0.0;
  bool sensitivity_defined = true;
  bool failed = false;
  std::string error;

  bool operator==(const CellResult&) const = default;
};

struct SweepResult {
  std::vector<AxisName> axis_order;  // declared axes, slowest first
  std::vector<double> k_b_values;
  std::vector<double> k_f_values;
  std::vector<double> chi_values;
  std::vector<CellResult> cells;  // index (chi, k_b, k_f), k_f fastest
  std::uint64_t eigendecompositions = 0;
  std::uint64_t perturbed_decompositions = 0;
  std::size_t failed_cells = 0;
  double max_delta_phi = 0.0;  // normalization of the heatmap
  double max_sensitivity = 0.0;
  bool relaxation_grid_reduced = false;
  bool complete = true;

  std::size_t index(std::size_t i_chi, std::size_t i_kb, std::size_t i_kf) const {
    return (i_chi * k_b_values.size() + i_kb) * k_f_values.size() + i_kf;
  }
  const CellResult& cell(std::size_t i_chi, std::size_t i_kb, std::size_t i_kf) const {
    return cells[index(i_chi, i_kb, i_kf)];
  }
};

struct SweepOptions {
  unsigned threads = 1;
  double cell_budget_seconds = 60.0;
  std::string checkpoint_path;  // empty: no checkpointing
  std::size_t checkpoint_every = 8;
  std::size_t stop_after_units = 0;  // 0: run to completion
  std::string config_hash;
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Effective axis values after relaxation thinning.
std::vector<double> effective_values(const SweepGrid& grid, AxisName name, bool relaxation);

/// Deterministic fingerprint of everything that affects cell values.
std::string sweep_fingerprint(const SweepInputs& inputs);

SweepResult run_sweep(const SweepInputs& inputs, const SweepOptions& options = {});

/// Yields for many k_f values from a single eigensystem. Relaxation makes
/// the kernel depend on k_f, so an active relaxation spec is rejected.
std::vector<double> factorized_kf_sweep(const EigenSystem& eig, const CMatrix& rho0,
                                        const CMatrix& projector, double k_b,
                                        std::span<const double> k_f_values,
                                        const RelaxationSpec& relaxation = {});

struct SeriesEntry {
  std::size_t nucleus_count = 0;
  std::vector<std::string> labels;
  SweepResult result;
};

/// Runs the same grid on systems truncated to the first 1..N nuclei of
/// `order` (labels). Empty order: radical A then radical B as listed.
std::vector<SeriesEntry> hyperfine_series(const SweepInputs& inputs,
                                          const std::vector<std::string>& order,
                                          const SweepOptions& options = {});

/// System keeping only the named nuclei (radical membership preserved).
SpinSystem truncate_system(const SpinSystem& system, const std::vector<std::string>& labels);

}  // namespace rpzeno
