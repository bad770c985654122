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

/// Histogram of lags b - a. Bin k collects lags in [k w - w/2, k w + w/2) for
/// k in [-half_bins, half_bins].
struct CorrelationHistogram {
  std::uint64_t bin_ticks = 1;
  double tick_s = 1e-9;
  std::int64_t half_bins = 0;
  std::vector<std::uint64_t> counts;  // index i <-> bin i - half_bins
  double background = 0.0;            // mean over bins with |k| > 1
  std::int64_t peak_bin = 0;
  std::uint64_t peak_counts = 0;

  double bin_width_s() const { return bin_ticks * tick_s; }
  double lag_s(std::int64_t bin) const { return bin * bin_width_s(); }
  std::uint64_t at(std::int64_t bin) const { return counts[bin + half_bins]; }
  /// Counts summed over bins |k| <= half_width.
  std::uint64_t central_sum(std::int64_t half_width) const;
};

/// Two-pointer sweep over sorted tick lists, O(n_a + n_b + pairs in range).
/// half_bins must be >= 2 so that off-peak bins exist.
CorrelationHistogram g2(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                        std::uint64_t bin_ticks, std::int64_t half_bins, double tick_s = 1e-9);

/// (peak - background) / sqrt(background); numeric error for zero background.
double peak_significance(const CorrelationHistogram& h);

}  // namespace ionabsorb
