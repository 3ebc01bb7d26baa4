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

#include <cstdint>
#include <random>

namespace qlimits {

/// Independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
  kFrame = 1,
  kMonteCarlo = 2,
  kParams = 3,
  kMultistart = 4,
  kDataset = 5,
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Counter-based seed derivation:
///
///   h    = mix64(master + G * stream)
///   seed = mix64(h + G * (counter + 1))
///
/// with G = 0x9E3779B97F4A7C15. The seed for element `counter` of a stream is
/// a pure function of (master, stream, counter), so work split across threads
/// in any order reproduces the same bytes.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t counter) noexcept;

/// Per-stream generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the distributions below are
/// implemented here rather than taken from <random>, whose algorithms are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method (pairs cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace qlimits
