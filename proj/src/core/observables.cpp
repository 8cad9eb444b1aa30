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

#include "core/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "core/error.hpp"

namespace rpzeno {

namespace {

double shannon(std::span<const double> p, EntropyBase base) {
  double s = 0.0;
  for (const double v : p)
    if (v > 0.0) s -= v * std::log(v);
  return base == EntropyBase::Bits ? s / std::numbers::ln2 : s;
}

double unit_interval(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(OrientationScheme scheme) {
  return scheme == OrientationScheme::Fibonacci ? "fibonacci" : "random-uniform";
}

std::string_view to_string(Partition partition) {
  return partition == Partition::Local ? "local" : "global";
}

std::string_view to_string(EntropyBase base) {
  return base == EntropyBase::Natural ? "natural" : "bits";
}

OrientationSet sample_orientations(std::size_t count, OrientationScheme scheme,
                                   std::uint64_t seed) {
  if (count < 2) throw Error(ErrorKind::InvalidArgument, "orientation count must be >= 2");
  OrientationSet set{count, scheme, seed, {}};
  set.points.reserve(count);
  const double two_pi = 2.0 * std::numbers::pi;
  if (scheme == OrientationScheme::Fibonacci) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
      const double phi = std::fmod(static_cast<double>(i) * golden_angle, two_pi);
      set.points.push_back({std::acos(std::clamp(z, -1.0, 1.0)), phi});
    }
  } else {
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < count; ++i) {
      const double cos_theta = 2.0 * unit_interval(gen) - 1.0;
      const double phi = two_pi * unit_interval(gen);
      set.points.push_back({std::acos(cos_theta), phi});
    }
  }
  return set;
}

AnisotropyStats anisotropy_lenient(std::span<const double> yields, bool* sensitivity_defined) {
  if (yields.empty()) throw Error(ErrorKind::InvalidArgument, "anisotropy of an empty list");
  AnisotropyStats s;
  s.max = yields[0];
  s.min = yields[0];
  double sum = 0.0;
  for (const double y : yields) {
    if (!std::isfinite(y)) throw Error(ErrorKind::InvalidArgument, "non-finite yield");
    s.max = std::max(s.max, y);
    s.min = std::min(s.min, y);
    sum += y;
  }
  s.mean = sum / static_cast<double>(yields.size());
  s.delta = s.max - s.min;
  const bool defined = s.mean != 0.0;
  s.sensitivity = defined ? s.delta / s.mean : 0.0;
  if (sensitivity_defined) *sensitivity_defined = defined;
  return s;
}

AnisotropyStats anisotropy(std::span<const double> yields) {
  bool defined = true;
  const auto s = anisotropy_lenient(yields, &defined);
  if (!defined)
    throw Error(ErrorKind::UndefinedSensitivity, "mean yield is zero; sensitivity undefined");
  return s;
}

CMatrix partial_trace_nuclei(const CMatrix& rho, std::size_t nuclear_dim) {
  const auto m = static_cast<Eigen::Index>(nuclear_dim);
  if (m < 1 || rho.rows() != 4 * m || rho.cols() != 4 * m)
    throw Error(ErrorKind::DimensionMismatch, "state dimension is not 4 x nuclear dimension");
  CMatrix out = CMatrix::Zero(4, 4);
  for (Eigen::Index a = 0; a < 4; ++a)
    for (Eigen::Index b = 0; b < 4; ++b) {
      Complex s{0.0, 0.0};
      for (Eigen::Index n = 0; n < m; ++n) s += rho(a * m + n, b * m + n);
      out(a, b) = s;
    }
  return out;
}

double von_neumann_entropy(const CMatrix& rho, EntropyBase base) {
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = solver.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -1e-8)
    throw Error(ErrorKind::InvalidState,
                "state has a negative eigenvalue " + std::to_string(ev.minCoeff()));
  std::vector<double> p(ev.data(), ev.data() + ev.size());
  return shannon(p, base);
}

double relative_entropy_coherence(const CMatrix& rho, Partition partition,
                                  std::size_t nuclear_dim, EntropyBase base) {
  CMatrix state = partition == Partition::Local ? partial_trace_nuclei(rho, nuclear_dim) : rho;
  const double tr = state.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorKind::InvalidState, "state has non-positive trace");
  if (tr != 1.0) state /= tr;
  std::vector<double> diag(static_cast<std::size_t>(state.rows()));
  for (Eigen::Index i = 0; i < state.rows(); ++i) {
    const double v = state(i, i).real();
    if (v < -1e-8) throw Error(ErrorKind::InvalidState, "negative population");
    diag[static_cast<std::size_t>(i)] = std::max(v, 0.0);
  }
  return shannon(diag, base) - von_neumann_entropy(state, base);
}

IntegratedCoherence time_integrated_coherence(const EigenSystem& eig, const CMatrix& rho0,
                                              double k_f, Partition partition,
                                              std::size_t nuclear_dim,
                                              const CoherenceQuadrature& q) {
  if (q.initial_intervals < 1 || q.max_intervals < q.initial_intervals)
    throw Error(ErrorKind::InvalidArgument, "invalid quadrature interval counts");
  const CMatrix rho_t = to_eigenbasis(eig, rho0);
  auto state_at = [&](double t) { return t == 0.0 ? rho0 : evolve(eig, rho_t, k_f, t); };

  double fastest = std::max(k_f, 1e-12);
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    fastest = std::max(fastest, std::abs(eig.eigenvalues(i)));
  const double t_min = 1e-4 / fastest;

  // End of the survival window.
  double t_end = std::max(10.0 * t_min, 1.0 / fastest);
  for (int iter = 0;; ++iter) {
    if (state_at(t_end).trace().real() < q.survival_floor) break;
    if (iter > 200)
      throw Error(ErrorKind::NonConvergent, "population does not decay below the survival floor");
    t_end *= 2.0;
  }

  auto integrand = [&](double t) {
    const CMatrix rho = state_at(t);
    const double survival = rho.trace().real();
    if (!(survival > 0.0)) return 0.0;
    const double c = relative_entropy_coherence(rho, partition, nuclear_dim, q.base);
    return q.survival_weighted ? c * survival : c;
  };

  const double f0 = integrand(0.0);
  const double log_span = std::log(t_end / t_min);
  auto time_of = [&](std::size_t i, std::size_t n) {
    return t_min * std::exp(log_span * static_cast<double>(i) / static_cast<double>(n));
  };
  auto trapezoid = [&](const std::vector<double>& f, std::size_t n) {
    double sum = 0.5 * (f0 + f[0]) * t_min;
    for (std::size_t i = 0; i < n; ++i)
      sum += 0.5 * (f[i] + f[i + 1]) * (time_of(i + 1, n) - time_of(i, n));
    return sum;
  };

  std::size_t n = q.initial_intervals;
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = integrand(time_of(i, n));
  double estimate = trapezoid(f, n);

  IntegratedCoherence out;
  out.t_end = t_end;
  while (2 * n <= q.max_intervals) {
    std::vector<double> g(2 * n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[2 * i] = f[i];
    for (std::size_t i = 0; i < n; ++i) g[2 * i + 1] = integrand(time_of(2 * i + 1, 2 * n));
    n *= 2;
    f = std::move(g);
    const double refined = trapezoid(f, n);
    const double change = std::abs(refined - estimate);
    estimate = refined;
    if (change <= q.relative_tolerance * std::abs(refined) || change < 1e-14) {
      out.converged = true;
      break;
    }
  }
  out.value = estimate;
  out.points = n + 2;
  return out;
}

CoherenceStats coherence_statistics(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "coherence statistics of an empty list");
  double lo = values[0], hi = values[0], sum = 0.0;
  for (const double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  return {sum / static_cast<double>(values.size()), hi - lo};
}

}  // namespace rpzeno
