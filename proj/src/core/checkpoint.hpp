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

// Sweep checkpoint container (JSON, versioned). Doubles are written with
// shortest round-trip formatting, so a resumed sweep is bit-identical.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/sweep.hpp"

namespace rpzeno {

inline constexpr int kCheckpointFormatVersion = 1;

struct UnitPayload {
  std::vector<CellResult> cells;
  std::uint64_t eigendecompositions = 0;
  std::uint64_t perturbed = 0;
  bool operator==(const UnitPayload&) const = default;
};

struct CheckpointState {
  std::string config_hash;
  std::string fingerprint;
  std::size_t cells_per_unit = 0;
  std::vector<bool> completed;
  std::vector<UnitPayload> units;  // empty payload for incomplete units

  std::size_t completed_count() const;
};

/// Atomic (temp file + rename).
void save_checkpoint(const std::string& path, const CheckpointState& state);

/// std::nullopt when the file does not exist; Io error when it is unreadable
/// or malformed.
std::optional<CheckpointState> load_checkpoint(const std::string& path);

}  // namespace rpzeno
