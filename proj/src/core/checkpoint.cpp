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

#include "core/checkpoint.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/output.hpp"

namespace rpzeno {

namespace {

using nlohmann::json;

json cell_to_json(const CellResult& c) {
  json j = json::array({c.delta_phi, c.mean_phi, c.sensitivity, c.max_phi, c.min_phi,
                        c.sensitivity_defined, c.failed});
  if (c.failed) j.push_back(c.error);
  return j;
}

CellResult cell_from_json(const json& j) {
  if (!j.is_array() || j.size() < 7) throw Error(ErrorKind::Io, "malformed checkpoint cell");
  CellResult c;
  c.delta_phi = j[0].get<double>();
  c.mean_phi = j[1].get<double>();
  c.sensitivity = j[2].get<double>();
  c.max_phi = j[3].get<double>();
  c.min_phi = j[4].get<double>();
  c.sensitivity_defined = j[5].get<bool>();
  c.failed = j[6].get<bool>();
  if (c.failed && j.size() > 7) c.error = j[7].get<std::string>();
  return c;
}

}  // namespace

std::size_t CheckpointState::completed_count() const {
  return static_cast<std::size_t>(std::count(completed.begin(), completed.end(), true));
}

void save_checkpoint(const std::string& path, const CheckpointState& state) {
  json doc;
  doc["format"] = "rpzeno-checkpoint";
  doc["version"] = kCheckpointFormatVersion;
  doc["config_hash"] = state.config_hash;
  doc["fingerprint"] = state.fingerprint;
  doc["cells_per_unit"] = state.cells_per_unit;
  doc["unit_count"] = state.completed.size();
  std::string bitmap(state.completed.size(), '0');
  for (std::size_t i = 0; i < state.completed.size(); ++i)
    if (state.completed[i]) bitmap[i] = '1';
  doc["completed"] = bitmap;
  json units = json::object();
  for (std::size_t i = 0; i < state.completed.size(); ++i) {
    if (!state.completed[i]) continue;
    const auto& u = state.units[i];
    json cells = json::array();
    for (const auto& c : u.cells) cells.push_back(cell_to_json(c));
    units[std::to_string(i)] = {{"eig", u.eigendecompositions},
                                {"perturbed", u.perturbed},
                                {"cells", std::move(cells)}};
  }
  doc["units"] = std::move(units);
  write_file_atomic(path, doc.dump() + "\n");
}

std::optional<CheckpointState> load_checkpoint(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read checkpoint " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    const json doc = json::parse(buffer.str());
    if (doc.at("format").get<std::string>() != "rpzeno-checkpoint")
      throw Error(ErrorKind::Io, "not a checkpoint file: " + path);
    if (doc.at("version").get<int>() != kCheckpointFormatVersion)
      throw Error(ErrorKind::ResumeMismatch, "unsupported checkpoint format version");
    CheckpointState state;
    state.config_hash = doc.at("config_hash").get<std::string>();
    state.fingerprint = doc.at("fingerprint").get<std::string>();
    state.cells_per_unit = doc.at("cells_per_unit").get<std::size_t>();
    const auto bitmap = doc.at("completed").get<std::string>();
    if (bitmap.size() != doc.at("unit_count").get<std::size_t>())
      throw Error(ErrorKind::Io, "checkpoint bitmap length mismatch");
    state.completed.assign(bitmap.size(), false);
    state.units.assign(bitmap.size(), {});
    const json& units = doc.at("units");
    for (std::size_t i = 0; i < bitmap.size(); ++i) {
      if (bitmap[i] != '1') continue;
      const json& u = units.at(std::to_string(i));
      UnitPayload p;
      p.eigendecompositions = u.at("eig").get<std::uint64_t>();
      p.perturbed = u.at("perturbed").get<std::uint64_t>();
      for (const auto& c : u.at("cells")) p.cells.push_back(cell_from_json(c));
      if (p.cells.size() != state.cells_per_unit)
        throw Error(ErrorKind::Io, "checkpoint unit has the wrong cell count");
      state.completed[i] = true;
      state.units[i] = std::move(p);
    }
    return state;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, "malformed checkpoint " + path + ": " + e.what());
  }
}

}  // namespace rpzeno
