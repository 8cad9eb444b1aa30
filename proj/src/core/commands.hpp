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

// Command orchestration: each command writes CSV data, optional figures and
// manifest.json into the output directory.

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace rpzeno {

struct CommandOptions {
  std::string out_dir;  // empty: config output.directory
  unsigned threads = 1;
  bool render = true;
  std::string checkpoint_path;  // sweep only; empty: <out>/sweep.checkpoint.json
  bool fresh = false;           // discard an existing checkpoint
  std::size_t stop_after_units = 0;
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const std::string&)> log;
};

enum class CommandStatus { Ok, Partial, Interrupted };

struct CommandReport {
  CommandStatus status = CommandStatus::Ok;
  std::string out_dir;
  std::vector<std::string> files;  // relative to out_dir, manifest last
  std::size_t failed_cells = 0;
  std::uint64_t eigendecompositions = 0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

CommandReport cmd_yield(const RunConfig& config, const CommandOptions& options);
CommandReport cmd_sweep(const RunConfig& config, const CommandOptions& options);
CommandReport cmd_eigen(const RunConfig& config, const CommandOptions& options);
CommandReport cmd_coherence(const RunConfig& config, const CommandOptions& options);

/// Field orientation for an eigen direction preset ('x', 'y' or 'z').
Orientation direction_orientation(char axis);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace rpzeno
