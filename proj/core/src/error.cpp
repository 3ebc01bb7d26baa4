// Copyright 2026 The qlimits Authors.
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

#include "qlimits/error.hpp"

#include <utility>

namespace qlimits {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kFormatError: return "format-error";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kSizeMismatch: return "size-mismatch";
    case ErrorCode::kUnsupportedDtype: return "unsupported-dtype";
    case ErrorCode::kSingularModel: return "singular-model";
    case ErrorCode::kIllConditioned: return "ill-conditioned";
    case ErrorCode::kNotPositiveSemidefinite: return "not-positive-semidefinite";
    case ErrorCode::kInitFailed: return "init-failed";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

IllConditionedError::IllConditionedError(const std::string& message,
                                         std::vector<double> eigenvalues)
    : Error(ErrorCode::kIllConditioned, message), eigenvalues_(std::move(eigenvalues)) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace qlimits
