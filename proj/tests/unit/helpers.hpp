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

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "core/spin_core.hpp"

namespace testing {

inline double max_abs(const rpzeno::CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double diff(const rpzeno::CMatrix& a, const rpzeno::CMatrix& b) { return max_abs(a - b); }

inline rpzeno::Mat3 random_tensor(std::mt19937_64& gen, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  rpzeno::Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = u(gen);
  return t;
}

inline rpzeno::Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  rpzeno::Vec3 v(n(gen), n(gen), n(gen));
  return v.normalized();
}

inline rpzeno::Orientation random_orientation(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {std::acos(2.0 * u(gen) - 1.0), 2.0 * std::numbers::pi * u(gen)};
}

/// Random pair with Hilbert dimension at most `max_dim` (nuclear dimension
/// taken from {1, 2, 3, 4, 6}), general hyperfine tensors and a dipolar term.
inline rpzeno::SpinSystem random_system(std::mt19937_64& gen, std::size_t max_dim = 24) {
  static const std::vector<std::vector<int>> layouts = {
      {}, {2}, {3}, {2, 2}, {2, 3}, {3, 2}};
  std::vector<std::vector<int>> allowed;
  for (const auto& l : layouts) {
    std::size_t d = 4;
    for (int m : l) d *= static_cast<std::size_t>(m);
    if (d <= max_dim) allowed.push_back(l);
  }
  std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rpzeno::SpinSystem s;
  int k = 0;
  for (const int m : allowed[pick(gen)]) {
    rpzeno::NucleusSpec n;
    n.label = "n" + std::to_string(k++);
    n.multiplicity = m;
    n.hyperfine_mT = random_tensor(gen, 1.5);
    (coin(gen) ? s.radical_a_nuclei : s.radical_b_nuclei).push_back(n);
  }
  s.field_mT = 0.05 + 0.5 * u(gen);
  if (coin(gen)) s.dipolar = rpzeno::DipolarSpec::from_axis(1.0 + 2.0 * u(gen), random_unit(gen));
  return s;
}

}  // namespace testing
