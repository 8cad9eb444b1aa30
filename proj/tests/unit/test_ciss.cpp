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

#include <Eigen/Eigenvalues>

#include "core/ciss.hpp"
#include "core/error.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace rpzeno;
using testing::diff;

namespace {

const Complex kI{0.0, 1.0};
const double kPi = std::numbers::pi;

CMatrix s(int e, int a) { return oracle::pair_op(e, a); }
CMatrix one() { return CMatrix::Identity(4, 4); }
CMatrix zz() { return s(0, 2) * s(1, 2); }
CMatrix xx_yy() { return s(0, 0) * s(1, 0) + s(0, 1) * s(1, 1); }
CMatrix xy_yx() { return s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0); }
CMatrix dz() { return s(0, 2) - s(1, 2); }

// Operator expansions written out term by term.
CMatrix cisp_expansion(double chi) {
  return 0.25 * one() - zz() - xx_yy() * std::cos(chi) + 0.5 * dz() * std::sin(chi);
}
CMatrix cisc_expansion(double theta) {
  return 0.25 * one() - zz() - xx_yy() * std::cos(2 * theta) - xy_yx() * std::sin(2 * theta);
}
CMatrix channel_expansion(double chi, double j) {
  return 0.25 * one() - zz() - xx_yy() * std::cos(chi) -
         xy_yx() * std::sin(chi) * std::cos(4 * j) - 0.5 * dz() * std::sin(chi) * std::sin(4 * j);
}

// Channel built from a general matrix exponential.
CMatrix channel_oracle(const CMatrix& rho, double chi, double j) {
  CMatrix w = one();
  w(0, 0) = w(1, 1) = std::polar(1.0, chi);
  const CMatrix k = oracle::exchange_unitary(4.0 * j) * w;
  return k * rho * k.adjoint();
}

CMatrix nuclear(const CMatrix& e, std::size_t m) {
  return oracle::kron(e, CMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
}

SpinSystem system_with_nuclei(std::size_t m) {
  SpinSystem sys;
  if (m > 1) sys.radical_a_nuclei.push_back({"N", static_cast<int>(m), Mat3::Zero(), Mat3::Identity()});
  return sys;
}

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> chi_grid() {
  std::vector<double> v;
  for (int i = 0; i <= 12; ++i) v.push_back(-kPi / 2 + kPi * i / 12.0);
  return v;
}

}  // namespace

TEST_SUITE("ciss") {

TEST_CASE("CISP projector") {
  const Eigen::Vector4cd sk = oracle::ket_singlet();
  CHECK(diff(cisp_projector(0.0), sk * sk.adjoint()) < 1e-15);
  CMatrix ud = CMatrix::Zero(4, 4);
  ud(1, 1) = 1.0;
  CHECK(diff(cisp_projector(kPi / 2), ud) < 1e-15);
  const CMatrix p = cisp_projector(kPi / 4);
  CHECK(diff(p * p, p) < 1e-13);
  for (double chi : chi_grid()) {
    const CMatrix q = cisp_projector(chi);
    CHECK(diff(q, cisp_expansion(chi)) < 1e-13);
    CHECK(diff(q * q, q) < 1e-13);
    CHECK(diff(q, q.adjoint()) == 0.0);
  }
}

TEST_CASE("CISC projector") {
  const Eigen::Vector4cd sk = oracle::ket_singlet();
  CHECK(diff(cisc_projector(0.0), sk * sk.adjoint()) < 1e-15);
  const Eigen::Vector4cd psi = (sk + kI * oracle::ket_t0()) / std::sqrt(2.0);
  const CMatrix p = cisc_projector(kPi / 4);
  CHECK(diff(p, psi * psi.adjoint()) < 1e-15);
  CHECK(std::abs((dz() * p).trace()) < 1e-15);
  for (double chi : chi_grid()) {
    const CMatrix q = cisc_projector(0.5 * chi);
    CHECK(diff(q, cisc_expansion(0.5 * chi)) < 1e-13);
    CHECK(diff(q * q, q) < 1e-13);
    CHECK(std::abs(q.trace() - 1.0) < 1e-14);
    CHECK(std::abs((s(0, 2) * q).trace()) < 1e-15);
    CHECK(std::abs((s(1, 2) * q).trace()) < 1e-15);
  }
}

TEST_CASE("channel state: closed form and oracle unitary") {
  for (double chi : chi_grid())
    for (double j : {0.0, 0.1, kPi / 8, 0.5, -0.3}) {
      const CMatrix ch = channel_singlet_projector(chi, j);
      CHECK(diff(ch, channel_expansion(chi, j)) < 1e-13);
      const Eigen::Vector4cd sk = oracle::ket_singlet();
      CHECK(diff(ch, channel_oracle(sk * sk.adjoint(), chi, j)) < 1e-13);
      const CMatrix pt = (one() - sk * sk.adjoint()) / 3.0;
      const DensityOperator t = channel_state(Precursor::Triplet, chi, j, 2);
      CHECK(diff(t.matrix, nuclear(channel_oracle(pt, chi, j), 2) / 2.0) < 1e-13);
    }
  CHECK_THROWS_AS(channel_state(Precursor::Singlet, 0.1, 0.1, 0), Error);
}

TEST_CASE("channel interpolates CISP and CISC") {
  for (std::size_t m : {1u, 3u, 6u}) {
    const SpinSystem sys = system_with_nuclei(m);
    for (double chi : chi_grid())
      for (Precursor pre : {Precursor::Singlet, Precursor::Triplet}) {
        CissConfig cisp{CissModel::Cisp, chi, 0.0, pre};
        CissConfig cisc{CissModel::Cisc, chi, 0.0, pre};
        CHECK(diff(channel_state(pre, chi, kPi / 8, m).matrix, initial_state(cisp, sys).matrix) <
              1e-13);
        CHECK(diff(channel_state(pre, chi, 0.0, m).matrix, initial_state(cisc, sys).matrix) <
              1e-13);
      }
  }
}

TEST_CASE("CISP triplet identity") {
  for (std::size_t m : {1u, 2u, 6u}) {
    const SpinSystem sys = system_with_nuclei(m);
    const double z = static_cast<double>(m);
    const auto dim = static_cast<Eigen::Index>(4 * m);
    for (double chi : chi_grid()) {
      const CMatrix rs = initial_state({CissModel::Cisp, chi, 0.0, Precursor::Singlet}, sys).matrix;
      const CMatrix rt = initial_state({CissModel::Cisp, chi, 0.0, Precursor::Triplet}, sys).matrix;
      CHECK(diff(rt, CMatrix::Identity(dim, dim) / (3.0 * z) - rs / 3.0) < 1e-13);
    }
  }
}

TEST_CASE("CISP polarization") {
  const SpinSystem sys;
  for (int i = 0; i < 50; ++i) {
    const double chi = -kPi / 2 + kPi * i / 49.0;
    const CMatrix rho = initial_state({CissModel::Cisp, chi, 0.0, Precursor::Singlet}, sys).matrix;
    CHECK(std::abs((dz() * rho).trace() + std::sin(chi)) < 1e-12);
  }
}

TEST_CASE("CISC carries no polarization") {
  const SpinSystem sys = system_with_nuclei(2);
  for (double chi : chi_grid()) {
    const CMatrix rho = initial_state({CissModel::Cisc, chi, 0.0, Precursor::Singlet}, sys).matrix;
    CHECK(std::abs((nuclear(s(0, 2), 2) * rho).trace()) < 1e-14);
    CHECK(std::abs((nuclear(s(1, 2), 2) * rho).trace()) < 1e-14);
  }
}

TEST_CASE("initial states are valid density operators") {
  for (std::size_t m : {1u, 2u, 3u}) {
    const SpinSystem sys = system_with_nuclei(m);
    for (CissModel model : {CissModel::None, CissModel::Cisp, CissModel::Cisc, CissModel::Channel})
      for (Precursor pre : {Precursor::Singlet, Precursor::Triplet})
        for (double chi : chi_grid()) {
          const CMatrix rho = initial_state({model, chi, 0.3, pre}, sys).matrix;
          CHECK(std::abs(rho.trace() - 1.0) < 1e-13);
          CHECK(diff(rho, rho.adjoint()) < 1e-12);
          CHECK(min_eigenvalue(rho) > -1e-10);
        }
  }
}

TEST_CASE("model none and baseline states") {
  const SpinSystem sys = system_with_nuclei(3);
  const CMatrix ps = singlet_projector(sys), pt = triplet_projector(sys);
  CHECK(diff(initial_state({}, sys).matrix, ps / 3.0) < 1e-15);
  CHECK(diff(initial_state({CissModel::None, 0.0, 0.0, Precursor::Triplet}, sys).matrix,
             pt / 9.0) < 1e-15);
  CHECK(diff(initial_state({CissModel::Cisp, 0.0, 0.0, Precursor::Triplet}, sys).matrix,
             pt / 9.0) < 1e-15);
  CHECK(diff(recombination_projector({}, sys), ps) < 1e-15);
}

TEST_CASE("chi = 0 collapses every model") {
  const SpinSystem sys = system_with_nuclei(2);
  for (Precursor pre : {Precursor::Singlet, Precursor::Triplet}) {
    const CissConfig none{CissModel::None, 0.0, 0.0, pre};
    for (CissModel model : {CissModel::Cisp, CissModel::Cisc, CissModel::Channel})
      for (double j : {0.0, 0.2, kPi / 8, 1.0}) {
        const CissConfig c{model, 0.0, j, pre};
        CHECK(diff(initial_state(c, sys).matrix, initial_state(none, sys).matrix) < 1e-13);
        CHECK(diff(recombination_projector(c, sys), recombination_projector(none, sys)) < 1e-13);
      }
  }
}

TEST_CASE("recombination projectors") {
  const SpinSystem sys = system_with_nuclei(3);
  CMatrix ud = CMatrix::Zero(4, 4);
  ud(1, 1) = 1.0;
  CHECK(diff(recombination_projector({CissModel::Cisp, kPi / 2, 0.0, Precursor::Singlet}, sys),
             nuclear(ud, 3)) < 1e-15);
  for (double chi : chi_grid()) {
    for (CissModel model : {CissModel::Cisp, CissModel::Cisc, CissModel::Channel}) {
      const CMatrix p = recombination_projector({model, chi, 0.37, Precursor::Singlet}, sys);
      CHECK(diff(p * p, p) < 1e-13);
      CHECK(diff(p, p.adjoint()) < 1e-14);
      CHECK(std::abs(p.trace() - 3.0) < 1e-13);  // rank M
    }
    const CissConfig c{CissModel::Cisp, chi, 0.0, Precursor::Singlet};
    const double gap = diff(formation_projector(c), recombination_electron_projector(c));
    if (chi == 0.0) CHECK(gap < 1e-15);
    else CHECK(gap > 1e-3);
    // channel recombination reduces to the CISP and CISC rules
    CHECK(diff(recombination_electron_projector({CissModel::Channel, chi, kPi / 8, Precursor::Singlet}),
               cisp_projector(chi)) < 1e-13);
    CHECK(diff(recombination_electron_projector({CissModel::Channel, chi, 0.0, Precursor::Singlet}),
               cisc_projector(chi / 2)) < 1e-13);
  }
}

TEST_CASE("CISC is coherent where CISP is not") {
  const CMatrix cisc = cisc_projector(kPi / 4);
  const CMatrix cisp = cisp_projector(-kPi / 2);
  auto offdiag = [](const CMatrix& m) {
    CMatrix o = m;
    o.diagonal().setZero();
    return testing::max_abs(o);
  };
  CHECK(offdiag(cisp) < 1e-15);
  CHECK(offdiag(cisc) > 0.1);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS((CissConfig{CissModel::Cisp, 2.0, 0.0, Precursor::Singlet}.validate()), Error);
  CHECK_THROWS_AS((CissConfig{CissModel::Cisp, std::nan(""), 0.0, Precursor::Singlet}.validate()),
                  Error);
  CHECK_NOTHROW((CissConfig{CissModel::Cisp, -kPi / 2, 0.0, Precursor::Singlet}.validate()));
}

}  // TEST_SUITE
