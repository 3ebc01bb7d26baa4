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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qlimits {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kFormatError,
  kBadMagic,
  kSizeMismatch,
  kUnsupportedDtype,
  kSingularModel,
  kIllConditioned,
  kNotPositiveSemidefinite,
  kInitFailed,
  kNonConvergence,
  kIoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a Fisher matrix cannot be inverted within the requested
/// relative condition threshold. Carries the full eigenvalue spectrum.
class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& message, std::vector<double> eigenvalues);

  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<double> eigenvalues_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace qlimits
