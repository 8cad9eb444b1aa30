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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "core/dynamics.hpp"

namespace rpzeno {

enum class OrientationScheme { Fibonacci, RandomUniform };

std::string_view to_string(OrientationScheme scheme);

struct OrientationSet {
  std::size_t count = 0;
  OrientationScheme scheme = OrientationScheme::Fibonacci;
  std::uint64_t seed = 0;
  std::vector<Orientation> points;
};

/// Fibonacci: golden-angle spiral with z_i = 1 - (2i + 1)/N (seed unused).
/// Random-uniform: cos(theta) ~ U[-1, 1], phi ~ U[0, 2 pi) from mt19937_64.
OrientationSet sample_orientations(std::size_t count, OrientationScheme scheme,
                                   std::uint64_t seed);

struct AnisotropyStats {
  double delta = 0.0;  // max - min
  double mean = 0.0;
  double sensitivity = 0.0;  // delta / mean
  double max = 0.0;
  double min = 0.0;

  double sensitivity_percent() const { return 100.0 * sensitivity; }
};

/// Throws UndefinedSensitivity when the mean yield is zero.
AnisotropyStats anisotropy(std::span<const double> yields);

/// Same statistics, but a zero mean yields sensitivity = 0 instead of an
/// error; `sensitivity_defined` is cleared in that case.
AnisotropyStats anisotropy_lenient(std::span<const double> yields, bool* sensitivity_defined);

enum class Partition { Local, Global };
enum class EntropyBase { Natural, Bits };

std::string_view to_string(Partition partition);
std::string_view to_string(EntropyBase base);

/// Trace over all nuclei; electrons are the two leading sites.
CMatrix partial_trace_nuclei(const CMatrix& rho, std::size_t nuclear_dim);

double von_neumann_entropy(const CMatrix& rho, EntropyBase base);

/// C(rho) = S(diag rho) - S(rho) in the Zeeman product basis. A state with
/// trace below one is normalized first.
double relative_entropy_coherence(const CMatrix& rho, Partition partition,
                                  std::size_t nuclear_dim,
                                  EntropyBase base = EntropyBase::Natural);

struct CoherenceQuadrature {
  bool survival_weighted = true;
  double survival_floor = 1e-6;
  std::size_t initial_intervals = 256;
  std::size_t max_intervals = 1 << 16;
  double relative_tolerance = 0.01;
  EntropyBase base = EntropyBase::Natural;
  bool operator==(const CoherenceQuadrature&) const = default;
};

struct IntegratedCoherence {
  double value = 0.0;
  std::size_t points = 0;
  double t_end = 0.0;
  bool converged = false;
};

/// Integral of C(rho(t)/Tr rho(t)) w(t) dt, w = Tr rho(t) when survival
/// weighted. Grid: t = 0 plus a geometric grid up to the time where Tr rho
/// falls below the survival floor; trapezoid rule; the number of intervals
/// doubles (nested grids) until successive estimates agree to the relative
/// tolerance.
IntegratedCoherence time_integrated_coherence(const EigenSystem& eig, const CMatrix& rho0,
                                              double k_f, Partition partition,
                                              std::size_t nuclear_dim,
                                              const CoherenceQuadrature& quadrature = {});

struct CoherenceStats {
  double mean = 0.0;
  double max_difference = 0.0;
};

CoherenceStats coherence_statistics(std::span<const double> values);

}  // namespace rpzeno
