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

#include <numbers>

#include "core/config.hpp"
#include "core/error.hpp"
#include "helpers.hpp"

using namespace rpzeno;

namespace {

const char* kMinimal = R"(system:
  field: 50 uT
  radical_a:
    nuclei:
      - label: N5
        multiplicity: 3
        hyperfine: {unit: mT, tensor: [[-0.1, 0, 0], [0, -0.09, 0], [0, 0, 1.76]]}
  radical_b:
    nuclei:
      - label: H
        multiplicity: 2
        hyperfine: {unit: MHz, tensor: [[10, 0, 0], [0, 10, 0], [0, 0, 10]]}
        rotation: {euler_zyz: [30 deg, 60 deg, 0 deg]}
  dipolar: {mode: point_dipole, distance: 19 A, axis: [0, 0, 2]}
ciss:
  model: cisp
  chi: 45 deg
  precursor: singlet
kinetics:
  k_b: {scale: log, min: 1 us^-1, max: 1e6 us^-1, points: 7}
  k_f: 1 us^-1
orientations:
  count: 20
  scheme: random-uniform
  seed: 42
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("quantities") {
  CHECK(parse_quantity("50 uT", QuantityKind::Field) == doctest::Approx(0.05));
  CHECK(parse_quantity("50 \xC2\xB5T", QuantityKind::Field) == doctest::Approx(0.05));
  CHECK(parse_quantity("1 G", QuantityKind::Field) == doctest::Approx(0.1));
  CHECK(parse_quantity("2e3 1/ms", QuantityKind::Rate) == doctest::Approx(2.0));
  CHECK(parse_quantity("1 ns", QuantityKind::Time) == doctest::Approx(1e-3));
  CHECK(parse_quantity("10 A", QuantityKind::Length) == doctest::Approx(1.0));
  CHECK(parse_quantity("180 deg", QuantityKind::Angle) == doctest::Approx(std::numbers::pi));
  CHECK(parse_quantity("-1.760859630e11 rad/s/T", QuantityKind::Gyromagnetic) ==
        doctest::Approx(-176.0859630));
  CHECK_THROWS_AS(parse_quantity("50", QuantityKind::Field), Error);
  CHECK_THROWS_AS(parse_quantity("50 nm", QuantityKind::Field), Error);
  CHECK_THROWS_AS(parse_quantity("abc mT", QuantityKind::Field), Error);
}

TEST_CASE("minimal configuration") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.system.hilbert_dim() == 24);
  CHECK(c.system.field_mT == doctest::Approx(0.05));
  CHECK(c.system.radical_a_nuclei[0].hyperfine_mT(2, 2) == 1.76);
  const double g = std::abs(c.system.gyromagnetic_ratio);
  CHECK(c.system.radical_b_nuclei[0].hyperfine_mT(0, 0) ==
        doctest::Approx(10.0 * 2.0 * std::numbers::pi / g));
  CHECK(c.system.dipolar.distance_nm == doctest::Approx(1.9));
  CHECK(c.system.dipolar.axis.isApprox(Vec3::UnitZ()));
  CHECK(c.ciss.model == CissModel::Cisp);
  CHECK(c.ciss.chi == doctest::Approx(std::numbers::pi / 4));
  REQUIRE(c.k_b.axis);
  CHECK(c.k_b.axis->points == 7);
  CHECK(!c.k_f.axis);
  CHECK(c.k_f.value == 1.0);
  CHECK(c.orientations.scheme == OrientationScheme::RandomUniform);
  CHECK(config_orientations(c).points.size() == 20);
}

TEST_CASE("shipped configurations parse") {
  const RunConfig c = load_config(std::string(RPZENO_CONFIG_DIR) + "/one_nucleus_toy.cfg");
  CHECK(c.system.hilbert_dim() == 12);
  CHECK(c.ciss.precursor == Precursor::Triplet);
  CHECK(c.k_b.axis->points == 50);
  CHECK(c.eigen.directions == std::vector<char>{'x', 'z'});
  for (const char* name : {"fad_w_n2.cfg", "fad_w_n6.cfg", "fadh_o2_n1.cfg", "fadh_o2_n3.cfg"})
    CHECK_NOTHROW(load_config(std::string(RPZENO_CONFIG_DIR) + "/" + name));
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), Error);
}

TEST_CASE("errors name the offending key") {
  CHECK(error_of(replaced(kMinimal, "50 uT", "50")).find("system.field") != std::string::npos);
  CHECK(error_of(replaced(kMinimal, "k_f: 1 us^-1", "k_f: 1")).find("kinetics.k_f") !=
        std::string::npos);
  CHECK(error_of(replaced(kMinimal, "19 A", "19")).find("distance") != std::string::npos);
  const std::string unknown = error_of(replaced(kMinimal, "  seed: 42", "  seed: 42\n  sead: 1"));
  CHECK(unknown.find("orientations.sead") != std::string::npos);
  CHECK(unknown.find("unknown key") != std::string::npos);
  CHECK(error_of(std::string(kMinimal) + "extra: 1\n").find("extra") != std::string::npos);
  CHECK(error_of(replaced(kMinimal, "model: cisp", "model: spooky")).find("ciss.model") !=
        std::string::npos);
  CHECK(error_of(replaced(kMinimal, "45 deg", "120 deg")).find("chi") != std::string::npos);
  CHECK(!error_of(replaced(kMinimal, "multiplicity: 2", "multiplicity: 1")).empty());
  CHECK(!error_of("system: [1, 2").empty());
  // positions are 1-based
  const std::string pos = error_of(replaced(kMinimal, "50 uT", "50"));
  CHECK(pos.find("line 2, column") != std::string::npos);
}

TEST_CASE("canonical form round trips") {
  const RunConfig c = parse_config(kMinimal);
  const std::string text = canonical_config(c);
  const RunConfig again = parse_config(text);
  CHECK(again == c);
  CHECK(canonical_config(again) == text);
  const RunConfig toy = load_config(std::string(RPZENO_CONFIG_DIR) + "/fadh_o2_n3.cfg");
  CHECK(parse_config(canonical_config(toy)) == toy);
}

TEST_CASE("hash ignores output settings") {
  RunConfig a = parse_config(kMinimal);
  RunConfig b = a;
  b.output.directory = "elsewhere";
  b.output.png = false;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  b.system.field_mT = 0.06;
  CHECK(config_hash(a) != config_hash(b));
  // formatting differences do not matter
  const RunConfig c = parse_config(replaced(kMinimal, "50 uT", "0.05 mT"));
  CHECK(config_hash(a) == config_hash(c));
}

TEST_CASE("grid override") {
  RunConfig c = parse_config(kMinimal);
  apply_grid_override(c, "k_b=log:1e-3:1e6:50,k_f=linear:0:2:3");
  REQUIRE(c.k_b.axis);
  CHECK(c.k_b.axis->points == 50);
  CHECK(c.k_b.axis->min == 1e-3);
  REQUIRE(c.k_f.axis);
  CHECK(c.k_f.axis->scale == AxisScale::Linear);
  apply_grid_override(c, "k_f=5");
  CHECK(!c.k_f.axis);
  CHECK(c.k_f.value == 5.0);
  apply_grid_override(c, "chi=linear:0:1.5:4");
  REQUIRE(c.chi_axis);
  const SweepGrid g = sweep_grid(c);
  REQUIRE(g.axes.size() == 2);
  CHECK(g.axes[0].name == AxisName::Chi);
  CHECK(g.axes[1].name == AxisName::KB);
  CHECK(g.k_f == 5.0);
  CHECK_THROWS_AS(apply_grid_override(c, "k_q=1"), Error);
  CHECK_THROWS_AS(apply_grid_override(c, "k_b=log:1:2"), Error);
  CHECK_THROWS_AS(apply_grid_override(c, "k_b=log:0:2:5"), Error);
}

TEST_CASE("sweep inputs mirror the configuration") {
  const RunConfig c = parse_config(kMinimal);
  const SweepInputs in = sweep_inputs(c);
  CHECK(in.orientations.seed == 42);
  CHECK(in.ciss == c.ciss);
  CHECK(in.grid.axes.size() == 1);
  CHECK(in.grid.k_f == 1.0);
}

}  // TEST_SUITE
