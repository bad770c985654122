// Copyright 2026 The ionabsorb Authors
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
#include <optional>
#include <random>

namespace ionabsorb {

/// Mixes a master seed with a stream key into an independent engine seed.
///
/// The derivation is the SplitMix64 finalizer applied to
/// `master ^ (key * 0x9E3779B97F4A7C15)`, so every (master, key) pair names one
/// reproducible stream regardless of the order in which streams are created.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t key);

/// Combines a base stream id with a run index (e.g. scan point, trajectory).
constexpr std::uint64_t stream_key(std::uint64_t base, std::uint64_t index) {
  return (base << 32) ^ index;
}

// Stream ids used by the simulator. Values are part of the reproducibility
// contract: changing one changes every seeded output.
namespace streams {
inline constexpr std::uint64_t heralded_pairs = 1;
inline constexpr std::uint64_t absorbing_pairs = 2;
inline constexpr std::uint64_t ion = 3;
inline constexpr std::uint64_t fluorescence = 4;
inline constexpr std::uint64_t dark_counts = 5;
inline constexpr std::uint64_t jitter = 6;
inline constexpr std::uint64_t emission = 7;
inline constexpr std::uint64_t protocol = 8;
inline constexpr std::uint64_t inputs = 9;
}  // namespace streams

/// Deterministic random stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// implements every variate transform locally (the std distributions are
/// implementation-defined and would break cross-platform bit identity).
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t key)
      : engine_(derive_stream_seed(master_seed, key)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time; rate <= 0 yields +infinity.
  double exponential(double rate);

  /// Standard normal (polar Box-Muller, one cached spare).
  double normal();

  /// Cauchy variate with the given center and half width at half maximum.
  double cauchy(double center, double half_width);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace ionabsorb
