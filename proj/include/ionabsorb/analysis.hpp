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
#include <span>
#include <vector>

#include "ionabsorb/fitting.hpp"
#include "ionabsorb/timetag.hpp"

namespace ionabsorb {

struct FluorescenceTrace {
  double bin_s = 1e-3;
  std::vector<std::uint32_t> counts;

  /// histogram[k] = number of bins holding k detections.
  std::vector<std::uint64_t> histogram() const;
};

/// Counts per half-open bin [i t_b, (i+1) t_b) over [0, duration); the trace
/// has ceil(duration / t_b) bins.
FluorescenceTrace bin_counts(const TimeTagStream& stream, std::uint8_t channel, double t_b,
                             double duration_s);

double poisson_lower_tail(std::uint64_t n, double mean);  // P(X < n)
double poisson_upper_tail(std::uint64_t n, double mean);  // P(X >= n)

/// P(dark bin reads >= n) + P(bright bin reads < n).
double misclassification(std::uint64_t n, double mean_bright, double mean_dark);

/// Integer threshold in (mean_dark, mean_bright] minimising the
/// misclassification sum; ties go to the smaller threshold.
std::uint64_t optimal_count_threshold(double mean_bright, double mean_dark);

struct StateMeans {
  double bright;
  double dark;
  double bright_weight;
  int iterations;
};

/// Two-component Poisson mixture fitted by expectation-maximisation.
/// Throws numeric error when EM fails to converge in 500 iterations or the
/// histogram is explained by a single Poisson component.
StateMeans estimate_state_means(std::span<const std::uint64_t> histogram);
StateMeans estimate_state_means(std::span<const std::uint64_t> histogram, double init_low,
                                double init_high);

enum class JumpDirection { dark_to_bright, bright_to_dark };

struct JumpEvent {
  JumpDirection direction;
  std::size_t bin;  // first bin on the new side of the threshold
  double window_begin_s;
  double window_end_s;
  std::vector<std::uint64_t> ticks;              // buffered detections
  std::optional<std::uint64_t> transition_tick;  // set once extracted
};

/// Moving-average crossings of n_th in the requested direction.
///
/// The trailing average over N bins is classified above or below n_th; an
/// exact tie keeps the previous class. At each change of class the detections
/// of both averaging windows (N + 1 bins) are buffered.
std::vector<JumpEvent> detect_jumps(const TimeTagStream& stream, std::uint8_t channel, double n_th,
                                    double t_b, std::size_t N, JumpDirection direction,
                                    double duration_s);

/// r_on^-1 ln(1 + r_on / r_off).
double optimal_delay_threshold(double r_on, double r_off);

/// exp(-r_off tau) (1 - exp(-r_on tau)).
double detection_probability(double tau, double r_on, double r_off);

/// Index of the photon marking the transition.
///
/// dark_to_bright: the first photon whose preceding gap exceeds tau_th while
/// the following gap does not. bright_to_dark: the last photon whose following
/// gap exceeds tau_th while the preceding one does not. Gaps at the window
/// edges are measured to the given bounds, or never qualify without them.
/// Throws numeric error if no photon qualifies.
std::size_t extract_transition_photon(std::span<const double> times, double tau_th,
                                      JumpDirection direction,
                                      std::optional<double> window_begin = std::nullopt,
                                      std::optional<double> window_end = std::nullopt);

/// Dark-period durations from paired bright->dark / dark->bright transition
/// times; periods open at either end of the record are dropped.
std::vector<double> dark_period_durations(std::span<const double> to_dark,
                                          std::span<const double> to_bright);

/// 1/tau_on - 1/tau_off; requires 0 < tau_on <= tau_off.
double derived_absorption_rate(double tau_on, double tau_off);

struct RateEstimate {
  double value;
  double error;
};
RateEstimate derived_absorption_rate(const FitResult& on, const FitResult& off);

struct JumpAnalysisConfig {
  double bin_s = 1e-3;
  std::size_t window_bins = 10;
  std::uint8_t channel = channel::fluorescence;
  std::optional<std::uint64_t> count_threshold;  // overrides the optimum
};

struct JumpAnalysis {
  StateMeans means{};
  std::uint64_t count_threshold = 0;
  double r_on = 0.0;
  double r_off = 0.0;
  double tau_th = 0.0;
  std::vector<JumpEvent> to_bright;
  std::vector<JumpEvent> to_dark;
  std::size_t ambiguous = 0;  // windows without a qualifying photon
  std::vector<double> dark_durations;
  std::optional<FitResult> dark_fit;  // needs >= 2 dark periods

  std::vector<std::uint64_t> first_photon_ticks() const;
};

/// Full quantum-jump pipeline on a continuous record.
JumpAnalysis analyze_jumps(const TimeTagStream& stream, double duration_s,
                           const JumpAnalysisConfig& cfg = {});

/// First fluorescence photon in each gated detection window opened by a marker
/// tag. The window start counts as a preceding dark gap.
std::vector<std::uint64_t> gated_first_photons(const TimeTagStream& stream, double window_s,
                                               double tau_th,
                                               std::uint8_t fluorescence = channel::fluorescence,
                                               std::uint8_t marker = channel::marker);

}  // namespace ionabsorb
