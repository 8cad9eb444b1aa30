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

#include <doctest.h>

#include <algorithm>

#include "core/ciss.hpp"
#include "core/dynamics.hpp"
#include "core/error.hpp"
#include "core/observables.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace rpzeno;

namespace {

double angle(const Orientation& a, const Orientation& b) {
  const Vec3 u = field_vector(a, 1.0), v = field_vector(b, 1.0);
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("orientation sets") {
  const auto two = sample_orientations(2, OrientationScheme::Fibonacci, 0);
  const auto again = sample_orientations(2, OrientationScheme::Fibonacci, 99);
  CHECK(two.points == again.points);
  CHECK(angle(two.points[0], two.points[1]) > 2.0);

  const auto fib = sample_orientations(300, OrientationScheme::Fibonacci, 1);
  std::vector<double> nearest(300, 1e9);
  for (std::size_t i = 0; i < 300; ++i)
    for (std::size_t j = 0; j < 300; ++j)
      if (i != j) nearest[i] = std::min(nearest[i], angle(fib.points[i], fib.points[j]));
  double mean = 0.0, var = 0.0;
  for (double v : nearest) mean += v / 300.0;
  for (double v : nearest) var += (v - mean) * (v - mean) / 300.0;
  CHECK(std::sqrt(var) / mean < 0.3);
  CHECK(*std::min_element(nearest.begin(), nearest.end()) > 0.0);

  const auto r1 = sample_orientations(300, OrientationScheme::RandomUniform, 1);
  const auto r2 = sample_orientations(300, OrientationScheme::RandomUniform, 1);
  const auto r3 = sample_orientations(300, OrientationScheme::RandomUniform, 2);
  CHECK(r1.points == r2.points);
  CHECK(!(r1.points == r3.points));
  for (const auto& p : r1.points) {
    CHECK(p.theta >= 0.0);
    CHECK(p.theta <= std::numbers::pi);
    CHECK(p.phi >= 0.0);
    CHECK(p.phi < 2.0 * std::numbers::pi);
  }
  CHECK_THROWS_AS(sample_orientations(1, OrientationScheme::Fibonacci, 0), Error);
}

TEST_CASE("anisotropy") {
  const std::vector<double> c = {0.3, 0.3, 0.3};
  const auto sc = anisotropy(c);
  CHECK(sc.delta == 0.0);
  CHECK(sc.sensitivity == 0.0);
  const std::vector<double> y = {0.2, 0.4, 0.6};
  const auto s = anisotropy(y);
  CHECK(s.delta == doctest::Approx(0.4));
  CHECK(s.mean == doctest::Approx(0.4));
  CHECK(s.sensitivity == doctest::Approx(1.0));
  CHECK(s.sensitivity_percent() == doctest::Approx(100.0));
  std::vector<double> perm = {0.6, 0.2, 0.4};
  const auto sp = anisotropy(perm);
  CHECK(sp.delta == s.delta);
  CHECK(sp.max == s.max);
  CHECK(sp.min == s.min);
  CHECK(std::abs(sp.mean - s.mean) < 1e-16);
  const std::vector<double> zero = {0.0, 0.0};
  CHECK_THROWS_AS(anisotropy(zero), Error);
  bool defined = true;
  CHECK(anisotropy_lenient(zero, &defined).sensitivity == 0.0);
  CHECK(!defined);
  CHECK_THROWS_AS(anisotropy(std::vector<double>{}), Error);
}

TEST_CASE("isotropic system has no anisotropy") {
  SpinSystem s;
  const HamiltonianBuilder b(s);
  const CMatrix ps = singlet_projector(s);
  const CMatrix rho0 = ps;
  std::vector<double> y;
  for (const auto& o : sample_orientations(40, OrientationScheme::Fibonacci, 0).points) {
    const auto eig = eigendecompose(effective_hamiltonian(b.hamiltonian(o), ps, 3.0));
    y.push_back(yield_closed_form(eig, rho0, ps, 3.0, 1.0));
  }
  CHECK(anisotropy(y).delta < 1e-10);
}

TEST_CASE("relative entropy of coherence") {
  CMatrix diag = CMatrix::Zero(4, 4);
  diag.diagonal() << 0.1, 0.2, 0.3, 0.4;
  CHECK(std::abs(relative_entropy_coherence(diag, Partition::Global, 1)) < 1e-12);
  CHECK(std::abs(relative_entropy_coherence(CMatrix::Identity(8, 8) / 8.0, Partition::Global, 2)) < 1e-12);
  const Eigen::Vector4cd sk = oracle::ket_singlet();
  const CMatrix ps = sk * sk.adjoint();
  CHECK(relative_entropy_coherence(ps, Partition::Global, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(relative_entropy_coherence(ps, Partition::Global, 1, EntropyBase::Bits) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // sub-normalized states are rescaled
  CHECK(relative_entropy_coherence(0.3 * ps, Partition::Global, 1) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // local: singlet on electrons with a mixed nucleus
  const CMatrix joint = oracle::kron(ps, CMatrix::Identity(3, 3) / 3.0);
  CHECK(relative_entropy_coherence(joint, Partition::Local, 3) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CMatrix bad = diag;
  bad(0, 0) = -0.5;
  bad(3, 3) = 1.2;
  CHECK_THROWS_AS(relative_entropy_coherence(bad, Partition::Global, 1), Error);
}

TEST_CASE("coherence vanishes only for diagonal states") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 10; ++i) {
    const CMatrix rho = oracle::random_density(8, gen);
    CHECK(relative_entropy_coherence(rho, Partition::Global, 2) > 1e-6);
    CMatrix d = rho;
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (r != c) d(r, c) = 0.0;
    CHECK(std::abs(relative_entropy_coherence(d, Partition::Global, 2)) < 1e-10);
  }
}

TEST_CASE("partial trace") {
  std::mt19937_64 gen(9);
  const CMatrix rho = oracle::random_density(12, gen);
  const CMatrix red = partial_trace_nuclei(rho, 3);
  CHECK(std::abs(red.trace() - rho.trace()) < 1e-13);
  CHECK(testing::diff(red, red.adjoint()) < 1e-12);
  const CMatrix e = oracle::random_density(4, gen);
  const CMatrix n = oracle::random_density(3, gen);
  CHECK(testing::diff(partial_trace_nuclei(oracle::kron(e, n), 3), e) < 1e-14);
  CHECK_THROWS_AS(partial_trace_nuclei(rho, 5), Error);
}

TEST_CASE("time-integrated coherence") {
  // Zeeman-diagonal start under a diagonal Hamiltonian stays incoherent
  SpinSystem s;
  NucleusSpec n{"N", 3, Mat3::Zero(), Mat3::Identity()};
  n.hyperfine_mT(2, 2) = 1.0;
  s.radical_a_nuclei.push_back(n);
  const HamiltonianBuilder b(s);
  const CMatrix h = b.hamiltonian(Orientation{0.0, 0.0});
  CMatrix ud = CMatrix::Zero(4, 4);
  ud(1, 1) = 1.0;
  const CMatrix rho0 = extend_over_nuclei(ud, 3) / 3.0;
  const auto eig = eigendecompose(effective_hamiltonian(h, singlet_projector(s), 0.0));
  for (Partition part : {Partition::Local, Partition::Global}) {
    const auto r = time_integrated_coherence(eig, rho0, 1.0, part, 3);
    CHECK(r.converged);
    CHECK(std::abs(r.value) < 1e-10);
  }

  // Unweighted integral grows when k_f halves (k_b = 0, fixed H)
  const CMatrix h2 = b.hamiltonian(Orientation{1.0, 0.4});
  const CMatrix rs = singlet_projector(s) / 3.0;
  const auto eig2 = eigendecompose(effective_hamiltonian(h2, singlet_projector(s), 0.0));
  CoherenceQuadrature q;
  q.survival_weighted = false;
  double last = 0.0;
  for (double k_f : {4.0, 2.0, 1.0, 0.5}) {
    const auto r = time_integrated_coherence(eig2, rs, k_f, Partition::Global, 3, q);
    CHECK(r.converged);
    CHECK(r.value >= last);
    last = r.value;
  }

  // CISC theta = pi/4 is more coherent at t = 0 than CISP chi = pi/2
  const CissConfig cisc{CissModel::Cisc, std::numbers::pi / 2, 0.0, Precursor::Singlet};
  const CissConfig cisp{CissModel::Cisp, std::numbers::pi / 2, 0.0, Precursor::Singlet};
  const double c_cisc = relative_entropy_coherence(initial_state(cisc, s).matrix, Partition::Global, 3);
  const double c_cisp = relative_entropy_coherence(initial_state(cisp, s).matrix, Partition::Global, 3);
  CHECK(c_cisp < 1e-12);
  CHECK(c_cisc > c_cisp + 0.1);

  CoherenceQuadrature bad;
  bad.initial_intervals = 0;
  CHECK_THROWS_AS(time_integrated_coherence(eig2, rs, 1.0, Partition::Global, 3, bad), Error);
}

TEST_CASE("time-integrated coherence of a free precession") {
  // Unequal g-factors rotate S into T0 only; |ud> and |du> keep equal weight.
  SpinSystem s;
  s.gyromagnetic_ratio_b = kElectronGyromagneticRatio * 1.01;
  s.field_mT = 1.0;
  const HamiltonianBuilder b(s);
  const CMatrix h = b.hamiltonian(Orientation{0.0, 0.0});
  const CMatrix ps = singlet_projector(s);
  const auto eig = eigendecompose(effective_hamiltonian(h, ps, 0.0));
  const double k_f = 2.0;
  const auto r = time_integrated_coherence(eig, ps, k_f, Partition::Global, 1);
  CHECK(r.converged);
  // C = ln 2 throughout, weight exp(-k_f t)
  CHECK(r.value == doctest::Approx(std::log(2.0) / k_f).epsilon(0.01));
}

TEST_CASE("coherence statistics") {
  const std::vector<double> c = {0.7, 0.7};
  CHECK(coherence_statistics(c).mean == doctest::Approx(0.7));
  CHECK(coherence_statistics(c).max_difference == 0.0);
  const std::vector<double> v = {1.0, 3.0};
  CHECK(coherence_statistics(v).mean == 2.0);
  CHECK(coherence_statistics(v).max_difference == 2.0);
  const std::vector<double> w = {3.0, 1.0};
  CHECK(coherence_statistics(w).mean == coherence_statistics(v).mean);
  CHECK(coherence_statistics(w).max_difference == coherence_statistics(v).max_difference);
  CHECK_THROWS_AS(coherence_statistics(std::vector<double>{}), Error);
}

}  // TEST_SUITE
