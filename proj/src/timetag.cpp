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

#include "ionabsorb/timetag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

TimeTagStream::TimeTagStream(std::uint32_t tick_ps) : tick_ps_(tick_ps) {
  if (tick_ps == 0) throw usage_error("tick resolution must be > 0");
}

void TimeTagStream::push_back(TimeTag tag) {
  if (!ticks_.empty()) {
    const std::uint64_t last = ticks_.back();
    if (tag.timestamp < last || (tag.timestamp == last && tag.channel < channels_.back()))
      throw usage_error("time tags must be appended in (timestamp, channel) order");
  }
  ticks_.push_back(tag.timestamp);
  channels_.push_back(tag.channel);
}

void TimeTagStream::reserve(std::size_t n) {
  ticks_.reserve(n);
  channels_.reserve(n);
}

std::vector<std::uint64_t> TimeTagStream::channel_ticks(std::uint8_t ch) const {
  std::vector<std::uint64_t> out;
  out.reserve(channel_count(ch));
  for (std::size_t i = 0; i < ticks_.size(); ++i)
    if (channels_[i] == ch) out.push_back(ticks_[i]);
  return out;
}

std::vector<double> TimeTagStream::channel_times(std::uint8_t ch) const {
  std::vector<double> out;
  out.reserve(channel_count(ch));
  const double dt = tick_seconds();
  for (std::size_t i = 0; i < ticks_.size(); ++i)
    if (channels_[i] == ch) out.push_back(static_cast<double>(ticks_[i]) * dt);
  return out;
}

std::size_t TimeTagStream::channel_count(std::uint8_t ch) const {
  return static_cast<std::size_t>(std::count(channels_.begin(), channels_.end(), ch));
}

std::uint64_t TimeTagStream::to_ticks(double seconds) const {
  if (!(seconds >= 0.0)) throw usage_error("negative time cannot be tagged");
  double t = std::round(seconds / tick_seconds());
  if (t >= static_cast<double>(std::numeric_limits<std::uint64_t>::max()))
    throw usage_error("time exceeds the tick range");
  return static_cast<std::uint64_t>(t);
}

TimeTagStream TimeTagStream::merge(std::uint32_t tick_ps,
                                   const std::vector<std::vector<std::uint64_t>>& per_channel) {
  TimeTagStream out(tick_ps);
  std::size_t total = 0;
  for (const auto& v : per_channel) {
    if (!std::is_sorted(v.begin(), v.end())) throw usage_error("merge input must be sorted");
    total += v.size();
  }
  out.reserve(total);
  std::vector<std::size_t> pos(per_channel.size(), 0);
  using Head = std::pair<std::uint64_t, std::uint8_t>;
  std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
  for (std::size_t c = 0; c < per_channel.size(); ++c)
    if (!per_channel[c].empty()) heap.push({per_channel[c][0], static_cast<std::uint8_t>(c)});
  while (!heap.empty()) {
    auto [ts, ch] = heap.top();
    heap.pop();
    out.ticks_.push_back(ts);
    out.channels_.push_back(ch);
    if (++pos[ch] < per_channel[ch].size()) heap.push({per_channel[ch][pos[ch]], ch});
  }
  return out;
}

}  // namespace ionabsorb
