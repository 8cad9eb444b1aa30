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

#include "core/error.hpp"

namespace rpzeno {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::DegenerateDecomposition: return "degenerate-decomposition";
    case ErrorKind::DivergentYield: return "divergent-yield";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::NonConvergent: return "non-convergent";
    case ErrorKind::CapExceeded: return "dimension-cap-exceeded";
    case ErrorKind::UndefinedSensitivity: return "undefined-sensitivity";
    case ErrorKind::ResumeMismatch: return "resume-mismatch";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

}  // namespace rpzeno
