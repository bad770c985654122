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

#include "ionabsorb/correlation.hpp"

#include <cmath>
#include <cstdlib>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

std::uint64_t CorrelationHistogram::central_sum(std::int64_t half_width) const {
  std::uint64_t s = 0;
  for (std::int64_t k = -half_width; k <= half_width; ++k)
    if (std::llabs(k) <= half_bins) s += at(k);
  return s;
}

CorrelationHistogram g2(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                        std::uint64_t bin_ticks, std::int64_t half_bins, double tick_s) {
  if (bin_ticks == 0) throw usage_error("g2 bin width must be at least one tick");
  if (half_bins < 2) throw usage_error("g2 lag range must cover at least 2 bins on each side");
  CorrelationHistogram h;
  h.bin_ticks = bin_ticks;
  h.tick_s = tick_s;
  h.half_bins = half_bins;
  h.counts.assign(2 * half_bins + 1, 0);

  const std::int64_t w = static_cast<std::int64_t>(bin_ticks);
  // Accepted lags: [-(K w + w/2), K w + w/2) in doubled units to keep w/2 exact.
  const std::int64_t lo2 = -(2 * half_bins * w + w);
  const std::int64_t hi2 = 2 * half_bins * w + w;
  std::size_t start = 0;
  for (std::uint64_t ta : a) {
    const std::int64_t t = static_cast<std::int64_t>(ta);
    while (start < b.size() && 2 * (static_cast<std::int64_t>(b[start]) - t) < lo2) ++start;
    for (std::size_t j = start; j < b.size(); ++j) {
      const std::int64_t lag2 = 2 * (static_cast<std::int64_t>(b[j]) - t);
      if (lag2 >= hi2) break;
      ++h.counts[floor_div(lag2 + w, 2 * w) + half_bins];
    }
  }

  double bg = 0.0;
  std::size_t nbg = 0;
  for (std::int64_t k = -half_bins; k <= half_bins; ++k) {
    if (std::llabs(k) > 1) {
      bg += h.at(k);
      ++nbg;
    }
    std::uint64_t c = h.at(k);
    bool better =
        c > h.peak_counts || (c == h.peak_counts && std::llabs(k) < std::llabs(h.peak_bin));
    if (k == -half_bins || better) {
      h.peak_bin = k;
      h.peak_counts = c;
    }
  }
  h.background = bg / nbg;
  return h;
}

double peak_significance(const CorrelationHistogram& h) {
  if (!(h.background > 0.0)) throw numeric_error("significance undefined for zero background");
  return (h.peak_counts - h.background) / std::sqrt(h.background);
}

}  // namespace ionabsorb
