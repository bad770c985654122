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
#include <span>
#include <vector>

namespace ionabsorb {

namespace channel {
inline constexpr std::uint8_t herald = 0;
inline constexpr std::uint8_t fluorescence = 1;  // both PMTs combined
inline constexpr std::uint8_t emission_393 = 2;
inline constexpr std::uint8_t marker = 3;
inline constexpr std::uint8_t count = 4;
}  // namespace channel

struct TimeTag {
  std::uint8_t channel;
  std::uint64_t timestamp;  // ticks
  bool operator==(const TimeTag&) const = default;
};

/// Ordered detection records: timestamps nondecreasing, ties ordered by channel.
///
/// Stored as parallel arrays (9 bytes per record) since simulated runs reach
/// tens of millions of tags.
class TimeTagStream {
 public:
  explicit TimeTagStream(std::uint32_t tick_ps = 1000);

  std::uint32_t tick_ps() const { return tick_ps_; }
  double tick_seconds() const { return tick_ps_ * 1e-12; }
  std::size_t size() const { return ticks_.size(); }
  bool empty() const { return ticks_.empty(); }
  TimeTag operator[](std::size_t i) const { return {channels_[i], ticks_[i]}; }

  std::span<const std::uint64_t> timestamps() const { return ticks_; }
  std::span<const std::uint8_t> channels() const { return channels_; }

  /// Appends one record; throws usage error if it would break the ordering.
  void push_back(TimeTag tag);
  void reserve(std::size_t n);

  std::vector<std::uint64_t> channel_ticks(std::uint8_t ch) const;
  std::vector<double> channel_times(std::uint8_t ch) const;
  std::size_t channel_count(std::uint8_t ch) const;

  /// Seconds -> ticks, rounding to nearest.
  std::uint64_t to_ticks(double seconds) const;

  /// Merges per-channel sorted tick lists (index = channel id).
  static TimeTagStream merge(std::uint32_t tick_ps,
                             const std::vector<std::vector<std::uint64_t>>& per_channel);

  bool operator==(const TimeTagStream&) const = default;

 private:
  std::uint32_t tick_ps_;
  std::vector<std::uint64_t> ticks_;
  std::vector<std::uint8_t> channels_;
};

}  // namespace ionabsorb
