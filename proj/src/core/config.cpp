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

#include "core/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "core/error.hpp"
#include "core/output.hpp"

namespace rpzeno {

namespace {

// ---------------------------------------------------------------- parsing

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::Config, where(node) + path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(node, path, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  require_map(node, path);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (const auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      fail(kv.first, join(path, key), "unknown key (allowed: " + list + ")");
    }
  }
}

YAML::Node required(const YAML::Node& parent, const std::string& path, const char* key) {
  const YAML::Node n = parent[key];
  if (!n) fail(parent, join(path, key), "required key is missing");
  return n;
}

std::string scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(node, path, "expected a scalar");
  return node.Scalar();
}

double number(const YAML::Node& node, const std::string& path) {
  const std::string text = scalar(node, path);
  double v = 0.0;
  const char* end = text.data() + text.size();
  const char* begin = text.data();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) fail(node, path, "expected a number, got '" + text + "'");
  if (!std::isfinite(v)) fail(node, path, "value must be finite");
  return v;
}

long long integer(const YAML::Node& node, const std::string& path) {
  const std::string text = scalar(node, path);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(node, path, "expected an integer, got '" + text + "'");
  return v;
}

std::size_t count(const YAML::Node& node, const std::string& path, long long min_value) {
  const long long v = integer(node, path);
  if (v < min_value) fail(node, path, "must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

bool boolean(const YAML::Node& node, const std::string& path) {
  const std::string text = scalar(node, path);
  if (text == "true") return true;
  if (text == "false") return false;
  fail(node, path, "expected true or false, got '" + text + "'");
}

std::string_view kind_name(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::Field: return "magnetic field (mT, T, uT, G)";
    case QuantityKind::Rate: return "rate (us^-1, ns^-1, ms^-1, s^-1)";
    case QuantityKind::Time: return "time (us, ns, ps, ms, s)";
    case QuantityKind::Length: return "length (nm, A, pm)";
    case QuantityKind::Angle: return "angle (rad, deg)";
    case QuantityKind::Gyromagnetic: return "gyromagnetic ratio (rad/us/mT, rad/s/T)";
  }
  return "quantity";
}

const std::map<std::string, double, std::less<>>& unit_table(QuantityKind kind) {
  static const std::map<std::string, double, std::less<>> field{
      {"mT", 1.0}, {"T", 1e3}, {"uT", 1e-3}, {"G", 0.1}};
  static const std::map<std::string, double, std::less<>> rate{
      {"us^-1", 1.0}, {"1/us", 1.0}, {"ns^-1", 1e3}, {"1/ns", 1e3},
      {"ms^-1", 1e-3}, {"1/ms", 1e-3}, {"s^-1", 1e-6}, {"1/s", 1e-6}};
  static const std::map<std::string, double, std::less<>> time{
      {"us", 1.0}, {"ns", 1e-3}, {"ps", 1e-6}, {"ms", 1e3}, {"s", 1e6}};
  static const std::map<std::string, double, std::less<>> length{
      {"nm", 1.0}, {"A", 0.1}, {"pm", 1e-3}};
  static const std::map<std::string, double, std::less<>> angle{
      {"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};
  static const std::map<std::string, double, std::less<>> gyro{
      {"rad/us/mT", 1.0}, {"rad/s/T", 1e-9}};
  switch (kind) {
    case QuantityKind::Field: return field;
    case QuantityKind::Rate: return rate;
    case QuantityKind::Time: return time;
    case QuantityKind::Length: return length;
    case QuantityKind::Angle: return angle;
    case QuantityKind::Gyromagnetic: return gyro;
  }
  return field;
}

std::string normalize_micro(std::string unit) {
  for (const std::string micro : {"\xC2\xB5", "\xCE\xBC"}) {
    std::size_t pos;
    while ((pos = unit.find(micro)) != std::string::npos) unit.replace(pos, micro.size(), "u");
  }
  return unit;
}

double quantity(const YAML::Node& node, const std::string& path, QuantityKind kind) {
  const std::string text = scalar(node, path);
  try {
    return parse_quantity(text, kind);
  } catch (const Error& e) {
    fail(node, path, e.what());
  }
}

Mat3 matrix3(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 3) fail(node, path, "expected a 3x3 matrix [[..], [..], [..]]");
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i) {
    const YAML::Node row = node[i];
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.IsSequence() || row.size() != 3) fail(row, rp, "expected a row of 3 numbers");
    for (std::size_t j = 0; j < 3; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          number(row[j], rp + "[" + std::to_string(j) + "]");
  }
  return m;
}

Vec3 vector3(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 3) fail(node, path, "expected [x, y, z]");
  Vec3 v;
  for (std::size_t i = 0; i < 3; ++i)
    v(static_cast<Eigen::Index>(i)) = number(node[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Mat3 euler_zyz(double a, double b, double c) {
  const Mat3 rz_a = Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
  const Mat3 ry_b = Eigen::AngleAxisd(b, Vec3::UnitY()).toRotationMatrix();
  const Mat3 rz_c = Eigen::AngleAxisd(c, Vec3::UnitZ()).toRotationMatrix();
  return rz_a * ry_b * rz_c;
}

Mat3 rotation(const YAML::Node& node, const std::string& path) {
  if (node.IsSequence()) return matrix3(node, path);
  check_keys(node, path, {"euler_zyz"});
  const YAML::Node e = required(node, path, "euler_zyz");
  const std::string ep = join(path, "euler_zyz");
  if (!e.IsSequence() || e.size() != 3) fail(e, ep, "expected three angles");
  return euler_zyz(quantity(e[0], ep + "[0]", QuantityKind::Angle),
                   quantity(e[1], ep + "[1]", QuantityKind::Angle),
                   quantity(e[2], ep + "[2]", QuantityKind::Angle));
}

// Tensor in mT from {unit: mT | MHz | rad/us, tensor: [[..]]}.
Mat3 coupling_tensor(const YAML::Node& node, const std::string& path) {
  check_keys(node, path, {"unit", "tensor"});
  const YAML::Node u = required(node, path, "unit");
  const std::string unit = normalize_micro(scalar(u, join(path, "unit")));
  const Mat3 t = matrix3(required(node, path, "tensor"), join(path, "tensor"));
  const double g = std::abs(kElectronGyromagneticRatio);
  if (unit == "mT") return t;
  if (unit == "MHz") return t * (2.0 * std::numbers::pi / g);
  if (unit == "rad/us") return t / g;
  fail(u, join(path, "unit"), "tensor unit must be mT, MHz or rad/us");
}

template <typename E>
E enumeration(const YAML::Node& node, const std::string& path,
              std::initializer_list<std::pair<std::string_view, E>> options) {
  const std::string text = scalar(node, path);
  std::string list;
  for (const auto& [name, value] : options) {
    if (text == name) return value;
    list += (list.empty() ? "" : ", ") + std::string(name);
  }
  fail(node, path, "unknown value '" + text + "' (expected one of: " + list + ")");
}

AxisSpec axis(const YAML::Node& node, const std::string& path, AxisName name, QuantityKind kind) {
  check_keys(node, path, {"scale", "min", "max", "points"});
  AxisSpec a;
  a.name = name;
  a.scale = enumeration<AxisScale>(required(node, path, "scale"), join(path, "scale"),
                                   {{"log", AxisScale::Log}, {"linear", AxisScale::Linear}});
  a.min = quantity(required(node, path, "min"), join(path, "min"), kind);
  a.max = quantity(required(node, path, "max"), join(path, "max"), kind);
  a.points = count(required(node, path, "points"), join(path, "points"), 1);
  try {
    a.validate();
  } catch (const Error& e) {
    fail(node, path, e.what());
  }
  return a;
}

Sweepable sweepable(const YAML::Node& node, const std::string& path, AxisName name,
                    QuantityKind kind) {
  Sweepable s;
  if (node.IsMap()) {
    s.axis = axis(node, path, name, kind);
    s.value = s.axis->min;
  } else {
    s.value = quantity(node, path, kind);
  }
  return s;
}

NucleusSpec nucleus(const YAML::Node& node, const std::string& path) {
  check_keys(node, path, {"label", "multiplicity", "hyperfine", "rotation"});
  NucleusSpec n;
  n.label = scalar(required(node, path, "label"), join(path, "label"));
  if (n.label.empty()) fail(node, join(path, "label"), "label must not be empty");
  n.multiplicity = static_cast<int>(count(required(node, path, "multiplicity"),
                                          join(path, "multiplicity"), 2));
  n.hyperfine_mT = coupling_tensor(required(node, path, "hyperfine"), join(path, "hyperfine"));
  if (node["rotation"]) n.rotation = rotation(node["rotation"], join(path, "rotation"));
  return n;
}

std::vector<NucleusSpec> radical(const YAML::Node& node, const std::string& path) {
  check_keys(node, path, {"nuclei"});
  std::vector<NucleusSpec> out;
  const YAML::Node list = node["nuclei"];
  if (!list || list.IsNull()) return out;
  if (!list.IsSequence()) fail(list, join(path, "nuclei"), "expected a list of nuclei");
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(nucleus(list[i], join(path, "nuclei") + "[" + std::to_string(i) + "]"));
  return out;
}

DipolarSpec dipolar(const YAML::Node& node, const std::string& path) {
  require_map(node, path);
  enum class M { None, Point, Tensor };
  const M mode = enumeration<M>(required(node, path, "mode"), join(path, "mode"),
                                {{"none", M::None}, {"point_dipole", M::Point}, {"tensor", M::Tensor}});
  switch (mode) {
    case M::None:
      check_keys(node, path, {"mode"});
      return DipolarSpec::none();
    case M::Point: {
      check_keys(node, path, {"mode", "distance", "axis"});
      const double r = quantity(required(node, path, "distance"), join(path, "distance"),
                                QuantityKind::Length);
      const Vec3 u = vector3(required(node, path, "axis"), join(path, "axis"));
      try {
        return DipolarSpec::from_axis(r, u);
      } catch (const Error& e) {
        fail(node, path, e.what());
      }
    }
    case M::Tensor: {
      check_keys(node, path, {"mode", "unit", "tensor"});
      if (!node["unit"]) fail(node, join(path, "unit"), "required key is missing");
      if (!node["tensor"]) fail(node, join(path, "tensor"), "required key is missing");
      const std::string unit = normalize_micro(scalar(node["unit"], join(path, "unit")));
      const Mat3 m = matrix3(node["tensor"], join(path, "tensor"));
      const double g = std::abs(kElectronGyromagneticRatio);
      if (unit == "mT") return DipolarSpec::from_tensor(m);
      if (unit == "MHz") return DipolarSpec::from_tensor(m * (2.0 * std::numbers::pi / g));
      if (unit == "rad/us") return DipolarSpec::from_tensor(m / g);
      fail(node["unit"], join(path, "unit"), "tensor unit must be mT, MHz or rad/us");
    }
  }
  return DipolarSpec::none();
}

void parse_system(const YAML::Node& node, RunConfig& cfg) {
  const std::string path = "system";
  check_keys(node, path, {"field", "gyromagnetic_ratio", "gyromagnetic_ratio_b", "frame_rotation",
                          "radical_a", "radical_b", "dipolar"});
  SpinSystem& s = cfg.system;
  s.field_mT = quantity(required(node, path, "field"), "system.field", QuantityKind::Field);
  if (node["gyromagnetic_ratio"])
    s.gyromagnetic_ratio = quantity(node["gyromagnetic_ratio"], "system.gyromagnetic_ratio",
                                    QuantityKind::Gyromagnetic);
  if (node["gyromagnetic_ratio_b"])
    s.gyromagnetic_ratio_b = quantity(node["gyromagnetic_ratio_b"], "system.gyromagnetic_ratio_b",
                                      QuantityKind::Gyromagnetic);
  if (node["frame_rotation"])
    s.frame_rotation = rotation(node["frame_rotation"], "system.frame_rotation");
  if (node["radical_a"]) s.radical_a_nuclei = radical(node["radical_a"], "system.radical_a");
  if (node["radical_b"]) s.radical_b_nuclei = radical(node["radical_b"], "system.radical_b");
  if (node["dipolar"]) s.dipolar = dipolar(node["dipolar"], "system.dipolar");
}

void parse_ciss(const YAML::Node& node, RunConfig& cfg) {
  const std::string path = "ciss";
  check_keys(node, path, {"model", "chi", "channel_j", "precursor"});
  auto& c = cfg.ciss;
  c.model = enumeration<CissModel>(required(node, path, "model"), "ciss.model",
                                   {{"none", CissModel::None},
                                    {"cisp", CissModel::Cisp},
                                    {"cisc", CissModel::Cisc},
                                    {"channel", CissModel::Channel}});
  if (node["chi"]) {
    const Sweepable chi = sweepable(node["chi"], "ciss.chi", AxisName::Chi, QuantityKind::Angle);
    c.chi = chi.value;
    cfg.chi_axis = chi.axis;
  }
  if (node["channel_j"])
    c.channel_j = quantity(node["channel_j"], "ciss.channel_j", QuantityKind::Angle);
  if (node["precursor"])
    c.precursor = enumeration<Precursor>(node["precursor"], "ciss.precursor",
                                         {{"singlet", Precursor::Singlet},
                                          {"triplet", Precursor::Triplet}});
}

void parse_kinetics(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "kinetics", {"k_b", "k_f"});
  cfg.k_b = sweepable(required(node, "kinetics", "k_b"), "kinetics.k_b", AxisName::KB,
                      QuantityKind::Rate);
  cfg.k_f = sweepable(required(node, "kinetics", "k_f"), "kinetics.k_f", AxisName::KF,
                      QuantityKind::Rate);
}

void parse_relaxation(const YAML::Node& node, RunConfig& cfg) {
  const std::string path = "relaxation";
  check_keys(node, path, {"model", "gamma", "tau_c", "kernel_includes_kf"});
  auto& r = cfg.relaxation;
  r.model = enumeration<RelaxationSpec::Model>(
      required(node, path, "model"), "relaxation.model",
      {{"none", RelaxationSpec::Model::None}, {"random_field", RelaxationSpec::Model::RandomField}});
  if (node["gamma"]) r.rate = quantity(node["gamma"], "relaxation.gamma", QuantityKind::Rate);
  if (node["tau_c"]) r.tau_c = quantity(node["tau_c"], "relaxation.tau_c", QuantityKind::Time);
  if (node["kernel_includes_kf"])
    r.kernel_includes_kf = boolean(node["kernel_includes_kf"], "relaxation.kernel_includes_kf");
}

void parse_orientations(const YAML::Node& node, RunConfig& cfg) {
  const std::string path = "orientations";
  check_keys(node, path, {"count", "scheme", "seed"});
  auto& o = cfg.orientations;
  if (node["count"]) o.count = count(node["count"], "orientations.count", 2);
  if (node["scheme"])
    o.scheme = enumeration<OrientationScheme>(node["scheme"], "orientations.scheme",
                                              {{"fibonacci", OrientationScheme::Fibonacci},
                                               {"random-uniform", OrientationScheme::RandomUniform},
                                               {"random_uniform", OrientationScheme::RandomUniform}});
  if (node["seed"]) {
    const std::string text = scalar(node["seed"], "orientations.seed");
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size())
      fail(node["seed"], "orientations.seed", "expected an unsigned 64-bit integer");
    o.seed = seed;
  }
}

void parse_observables(const YAML::Node& node, RunConfig& cfg) {
  const std::string path = "observables";
  check_keys(node, path, {"coherence_partitions", "entropy_base", "survival_weighted",
                          "survival_floor", "relative_tolerance", "initial_intervals",
                          "max_intervals", "sensitivity_percent"});
  auto& o = cfg.observables;
  if (const YAML::Node p = node["coherence_partitions"]) {
    if (!p.IsSequence() || p.size() == 0)
      fail(p, "observables.coherence_partitions", "expected a non-empty list");
    o.partitions.clear();
    for (std::size_t i = 0; i < p.size(); ++i)
      o.partitions.push_back(enumeration<Partition>(
          p[i], "observables.coherence_partitions",
          {{"local", Partition::Local}, {"global", Partition::Global}}));
  }
  auto& q = o.quadrature;
  if (node["entropy_base"])
    q.base = enumeration<EntropyBase>(node["entropy_base"], "observables.entropy_base",
                                      {{"natural", EntropyBase::Natural}, {"bits", EntropyBase::Bits}});
  if (node["survival_weighted"])
    q.survival_weighted = boolean(node["survival_weighted"], "observables.survival_weighted");
  if (node["survival_floor"])
    q.survival_floor = number(node["survival_floor"], "observables.survival_floor");
  if (node["relative_tolerance"])
    q.relative_tolerance = number(node["relative_tolerance"], "observables.relative_tolerance");
  if (node["initial_intervals"])
    q.initial_intervals = count(node["initial_intervals"], "observables.initial_intervals", 1);
  if (node["max_intervals"])
    q.max_intervals = count(node["max_intervals"], "observables.max_intervals", 1);
  if (node["sensitivity_percent"])
    o.sensitivity_percent = boolean(node["sensitivity_percent"], "observables.sensitivity_percent");
}

void parse_output(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "output", {"directory", "formats"});
  auto& o = cfg.output;
  if (node["directory"]) o.directory = scalar(node["directory"], "output.directory");
  if (const YAML::Node f = node["formats"]) {
    if (!f.IsSequence()) fail(f, "output.formats", "expected a list");
    o.csv = o.svg = o.png = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string v = scalar(f[i], "output.formats");
      if (v == "csv") o.csv = true;
      else if (v == "svg") o.svg = true;
      else if (v == "png") o.png = true;
      else fail(f[i], "output.formats", "unknown format '" + v + "' (expected csv, svg, png)");
    }
    if (!o.csv) fail(f, "output.formats", "csv output cannot be disabled");
  }
}

void parse_series(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "series", {"order"});
  cfg.series.enabled = true;
  if (const YAML::Node order = node["order"]) {
    if (!order.IsSequence()) fail(order, "series.order", "expected a list of nucleus labels");
    for (std::size_t i = 0; i < order.size(); ++i)
      cfg.series.order.push_back(scalar(order[i], "series.order"));
  }
}

void parse_eigen(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "eigen", {"directions"});
  if (const YAML::Node d = node["directions"]) {
    if (!d.IsSequence() || d.size() == 0) fail(d, "eigen.directions", "expected a non-empty list");
    cfg.eigen.directions.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string v = scalar(d[i], "eigen.directions");
      if (v != "x" && v != "y" && v != "z") fail(d[i], "eigen.directions", "expected x, y or z");
      cfg.eigen.directions.push_back(v[0]);
    }
  }
}

void parse_limits(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "limits", {"cell_budget", "relaxation_max_points", "checkpoint_every"});
  auto& l = cfg.limits;
  if (node["cell_budget"])
    l.cell_budget_us = quantity(node["cell_budget"], "limits.cell_budget", QuantityKind::Time);
  if (node["relaxation_max_points"])
    l.relaxation_max_points = count(node["relaxation_max_points"], "limits.relaxation_max_points", 0);
  if (node["checkpoint_every"])
    l.checkpoint_every = count(node["checkpoint_every"], "limits.checkpoint_every", 1);
}

// ---------------------------------------------------------------- emitting

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string matrix_text(const Mat3& m) {
  std::string out = "[";
  for (int i = 0; i < 3; ++i) {
    out += i ? ", [" : "[";
    for (int j = 0; j < 3; ++j) out += (j ? ", " : "") + num(m(i, j));
    out += "]";
  }
  return out + "]";
}

std::string axis_text(const AxisSpec& a, const char* unit) {
  return "{scale: " + std::string(to_string(a.scale)) + ", min: " + num(a.min) + " " + unit +
         ", max: " + num(a.max) + " " + unit + ", points: " + std::to_string(a.points) + "}";
}

std::string sweepable_text(const Sweepable& s, const char* unit) {
  return s.axis ? axis_text(*s.axis, unit) : num(s.value) + " " + unit;
}

void emit_nuclei(std::ostringstream& os, const char* name, const std::vector<NucleusSpec>& nuclei) {
  os << "  " << name << ":\n    nuclei:";
  if (nuclei.empty()) {
    os << " []\n";
    return;
  }
  os << "\n";
  for (const auto& n : nuclei) {
    os << "      - label: " << quoted(n.label) << "\n"
       << "        multiplicity: " << n.multiplicity << "\n"
       << "        hyperfine: {unit: mT, tensor: " << matrix_text(n.hyperfine_mT) << "}\n"
       << "        rotation: " << matrix_text(n.rotation) << "\n";
  }
}

}  // namespace

double parse_quantity(const std::string& text, QuantityKind kind) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  if (begin != end && *begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr == begin)
    throw Error(ErrorKind::Config, "expected '<number> <unit>' for a " +
                                       std::string(kind_name(kind)) + ", got '" + text + "'");
  if (!std::isfinite(v)) throw Error(ErrorKind::Config, "value must be finite");
  std::string unit(ptr, end);
  unit.erase(0, unit.find_first_not_of(" \t"));
  unit.erase(unit.find_last_not_of(" \t") + 1);
  if (unit.empty())
    throw Error(ErrorKind::Config,
                "missing unit in '" + text + "' (expected a " + std::string(kind_name(kind)) + ")");
  unit = normalize_micro(unit);
  const auto& table = unit_table(kind);
  const auto it = table.find(unit);
  if (it == table.end())
    throw Error(ErrorKind::Config, "unit '" + unit + "' is not a " + std::string(kind_name(kind)));
  return v * it->second;
}

void RunConfig::validate() const {
  try {
    system.validate();
    CissConfig c = ciss;
    c.validate();
    if (chi_axis) {
      if (chi_axis->name != AxisName::Chi) throw Error(ErrorKind::InvalidArgument, "chi axis misnamed");
      chi_axis->validate();
    }
    relaxation.validate();
    sweep_grid(*this).validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  if (orientations.count < 2) throw Error(ErrorKind::Config, "orientations.count must be >= 2");
  std::set<std::string> labels;
  for (const auto* list : {&system.radical_a_nuclei, &system.radical_b_nuclei})
    for (const auto& n : *list)
      if (!labels.insert(n.label).second)
        throw Error(ErrorKind::Config, "duplicate nucleus label '" + n.label + "'");
  for (const auto& l : series.order)
    if (!labels.count(l)) throw Error(ErrorKind::Config, "series.order: unknown nucleus '" + l + "'");
  std::set<std::string> seen;
  for (const auto& l : series.order)
    if (!seen.insert(l).second) throw Error(ErrorKind::Config, "series.order repeats '" + l + "'");
  const auto& q = observables.quadrature;
  if (!(q.survival_floor > 0.0 && q.survival_floor < 1.0))
    throw Error(ErrorKind::Config, "observables.survival_floor must lie in (0, 1)");
  if (!(q.relative_tolerance > 0.0))
    throw Error(ErrorKind::Config, "observables.relative_tolerance must be > 0");
  if (q.max_intervals < q.initial_intervals)
    throw Error(ErrorKind::Config, "observables.max_intervals must be >= initial_intervals");
  if (!(limits.cell_budget_us > 0.0))
    throw Error(ErrorKind::Config, "limits.cell_budget must be > 0");
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, "line " + std::to_string(e.mark.line + 1) + ", column " +
                                       std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  try {
    check_keys(root, "", {"system", "ciss", "kinetics", "relaxation", "orientations",
                          "observables", "output", "series", "eigen", "limits"});
    parse_system(required(root, "", "system"), cfg);
    if (root["ciss"]) parse_ciss(root["ciss"], cfg);
    parse_kinetics(required(root, "", "kinetics"), cfg);
    if (root["relaxation"]) parse_relaxation(root["relaxation"], cfg);
    if (root["orientations"]) parse_orientations(root["orientations"], cfg);
    if (root["observables"]) parse_observables(root["observables"], cfg);
    if (root["output"]) parse_output(root["output"], cfg);
    if (root["series"]) parse_series(root["series"], cfg);
    if (root["eigen"]) parse_eigen(root["eigen"], cfg);
    if (root["limits"]) parse_limits(root["limits"], cfg);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, "line " + std::to_string(e.mark.line + 1) + ", column " +
                                       std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw Error(ErrorKind::Config, path + ": " + e.what());
    throw;
  }
}

std::string canonical_config(const RunConfig& c, bool include_output) {
  std::ostringstream os;
  const auto& s = c.system;
  os << "system:\n"
     << "  field: " << num(s.field_mT) << " mT\n"
     << "  gyromagnetic_ratio: " << num(s.gyromagnetic_ratio) << " rad/us/mT\n";
  if (s.gyromagnetic_ratio_b)
    os << "  gyromagnetic_ratio_b: " << num(*s.gyromagnetic_ratio_b) << " rad/us/mT\n";
  os << "  frame_rotation: " << matrix_text(s.frame_rotation) << "\n";
  emit_nuclei(os, "radical_a", s.radical_a_nuclei);
  emit_nuclei(os, "radical_b", s.radical_b_nuclei);
  switch (s.dipolar.mode) {
    case DipolarSpec::Mode::None:
      os << "  dipolar: {mode: none}\n";
      break;
    case DipolarSpec::Mode::Axis:
      os << "  dipolar: {mode: point_dipole, distance: " << num(s.dipolar.distance_nm)
         << " nm, axis: [" << num(s.dipolar.axis.x()) << ", " << num(s.dipolar.axis.y()) << ", "
         << num(s.dipolar.axis.z()) << "]}\n";
      break;
    case DipolarSpec::Mode::Tensor:
      os << "  dipolar: {mode: tensor, unit: mT, tensor: " << matrix_text(s.dipolar.tensor_mT)
         << "}\n";
      break;
  }
  os << "ciss:\n"
     << "  model: " << to_string(c.ciss.model) << "\n"
     << "  chi: "
     << (c.chi_axis ? axis_text(*c.chi_axis, "rad") : num(c.ciss.chi) + " rad") << "\n"
     << "  channel_j: " << num(c.ciss.channel_j) << " rad\n"
     << "  precursor: " << to_string(c.ciss.precursor) << "\n"
     << "kinetics:\n"
     << "  k_b: " << sweepable_text(c.k_b, "us^-1") << "\n"
     << "  k_f: " << sweepable_text(c.k_f, "us^-1") << "\n"
     << "relaxation:\n"
     << "  model: "
     << (c.relaxation.model == RelaxationSpec::Model::None ? "none" : "random_field") << "\n"
     << "  gamma: " << num(c.relaxation.rate) << " us^-1\n"
     << "  tau_c: " << num(c.relaxation.tau_c) << " us\n"
     << "  kernel_includes_kf: " << (c.relaxation.kernel_includes_kf ? "true" : "false") << "\n"
     << "orientations:\n"
     << "  count: " << c.orientations.count << "\n"
     << "  scheme: "
     << (c.orientations.scheme == OrientationScheme::Fibonacci ? "fibonacci" : "random-uniform")
     << "\n"
     << "  seed: " << c.orientations.seed << "\n";
  const auto& q = c.observables.quadrature;
  os << "observables:\n  coherence_partitions: [";
  for (std::size_t i = 0; i < c.observables.partitions.size(); ++i)
    os << (i ? ", " : "") << to_string(c.observables.partitions[i]);
  os << "]\n"
     << "  entropy_base: " << to_string(q.base) << "\n"
     << "  survival_weighted: " << (q.survival_weighted ? "true" : "false") << "\n"
     << "  survival_floor: " << num(q.survival_floor) << "\n"
     << "  relative_tolerance: " << num(q.relative_tolerance) << "\n"
     << "  initial_intervals: " << q.initial_intervals << "\n"
     << "  max_intervals: " << q.max_intervals << "\n"
     << "  sensitivity_percent: " << (c.observables.sensitivity_percent ? "true" : "false") << "\n";
  if (c.series.enabled) {
    os << "series:\n  order: [";
    for (std::size_t i = 0; i < c.series.order.size(); ++i)
      os << (i ? ", " : "") << quoted(c.series.order[i]);
    os << "]\n";
  }
  os << "eigen:\n  directions: [";
  for (std::size_t i = 0; i < c.eigen.directions.size(); ++i)
    os << (i ? ", " : "") << c.eigen.directions[i];
  os << "]\n"
     << "limits:\n"
     << "  cell_budget: " << num(c.limits.cell_budget_us) << " us\n"
     << "  relaxation_max_points: " << c.limits.relaxation_max_points << "\n"
     << "  checkpoint_every: " << c.limits.checkpoint_every << "\n";
  if (include_output) {
    os << "output:\n"
       << "  directory: " << quoted(c.output.directory) << "\n"
       << "  formats: [csv";
    if (c.output.svg) os << ", svg";
    if (c.output.png) os << ", png";
    os << "]\n";
  }
  return os.str();
}

std::string config_hash(const RunConfig& config) {
  return sha256_hex(canonical_config(config, false));
}

void apply_grid_override(RunConfig& config, const std::string& spec) {
  std::stringstream entries(spec);
  std::string entry;
  while (std::getline(entries, entry, ',')) {
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, "grid override '" + entry + "' needs name=value");
    const std::string name = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    AxisName axis_name;
    if (name == "k_b") axis_name = AxisName::KB;
    else if (name == "k_f") axis_name = AxisName::KF;
    else if (name == "chi") axis_name = AxisName::Chi;
    else throw Error(ErrorKind::Config, "grid override: unknown axis '" + name + "'");

    auto parse_double = [&](const std::string& t) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw Error(ErrorKind::Config, "grid override: bad number '" + t + "' in " + entry);
      return v;
    };

    std::vector<std::string> parts;
    std::stringstream fields(value);
    std::string field;
    while (std::getline(fields, field, ':')) parts.push_back(field);

    std::optional<AxisSpec> axis;
    double fixed = 0.0;
    if (parts.size() == 1) {
      fixed = parse_double(parts[0]);
    } else if (parts.size() == 4) {
      AxisSpec a;
      a.name = axis_name;
      if (parts[0] == "log") a.scale = AxisScale::Log;
      else if (parts[0] == "linear") a.scale = AxisScale::Linear;
      else throw Error(ErrorKind::Config, "grid override: scale must be log or linear in " + entry);
      a.min = parse_double(parts[1]);
      a.max = parse_double(parts[2]);
      const double pts = parse_double(parts[3]);
      if (pts < 1 || pts != std::floor(pts))
        throw Error(ErrorKind::Config, "grid override: points must be a positive integer");
      a.points = static_cast<std::size_t>(pts);
      try {
        a.validate();
      } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("grid override: ") + e.what());
      }
      axis = a;
      fixed = a.min;
    } else {
      throw Error(ErrorKind::Config, "grid override '" + entry +
                                         "' must be name=value or name=scale:min:max:points");
    }
    switch (axis_name) {
      case AxisName::KB: config.k_b = {fixed, axis}; break;
      case AxisName::KF: config.k_f = {fixed, axis}; break;
      case AxisName::Chi:
        config.ciss.chi = fixed;
        config.chi_axis = axis;
        break;
    }
  }
  config.validate();
}

SweepGrid sweep_grid(const RunConfig& config) {
  SweepGrid grid;
  if (config.chi_axis) grid.axes.push_back(*config.chi_axis);
  if (config.k_b.axis) grid.axes.push_back(*config.k_b.axis);
  if (config.k_f.axis) grid.axes.push_back(*config.k_f.axis);
  if (grid.axes.size() > 2)
    throw Error(ErrorKind::Config, "at most two of chi, k_b and k_f may be axes");
  grid.k_b = config.k_b.value;
  grid.k_f = config.k_f.value;
  grid.relaxation_max_points = config.limits.relaxation_max_points;
  return grid;
}

OrientationSet config_orientations(const RunConfig& config) {
  return sample_orientations(config.orientations.count, config.orientations.scheme,
                             config.orientations.seed);
}

SweepInputs sweep_inputs(const RunConfig& config) {
  SweepInputs in;
  in.system = config.system;
  in.ciss = config.ciss;
  in.relaxation = config.relaxation;
  in.orientations = config_orientations(config);
  in.grid = sweep_grid(config);
  return in;
}

}  // namespace rpzeno
