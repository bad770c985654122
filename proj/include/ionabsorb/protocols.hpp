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
#include <string>
#include <string_view>
#include <vector>

#include "ionabsorb/analysis.hpp"
#include "ionabsorb/correlation.hpp"
#include "ionabsorb/fitting.hpp"
#include "ionabsorb/trajectory.hpp"

namespace ionabsorb {

struct CoincidenceSettings {
  double bin_s = 10e-6;
  std::int64_t half_bins = 200;
  std::int64_t window_bins = 5;  // coincidences: bins with |k| <= window_bins
};

struct CoincidenceCount {
  std::uint64_t counts = 0;
  double background = 0.0;  // expected accidentals in the window
  double net = 0.0;
  double error = 0.0;  // counts and background uncertainty combined
};

/// Counts in |k| <= window_bins against the accidentals expected from the
/// off-peak bins (|k| > 1). With a detection gate the accidental level at each
/// lag is scaled by the overlap 1 - |lag| / gate of two gated windows.
CoincidenceCount coincidence_count(const CorrelationHistogram& h, std::int64_t window_bins,
                                   std::optional<double> gate_s = std::nullopt);

struct ScanPoint {
  std::string label;
  double x = 0.0;
  double expected = 0.0;  // model prediction, arbitrary scale
  CoincidenceCount coincidences;
  std::size_t heralds = 0;
  std::size_t signals = 0;  // extracted absorption photons
};

struct QuantumJumpSettings {
  JumpAnalysisConfig analysis{};
  double g2_bin_s = 100e-6;
  std::int64_t g2_half_bins = 100;
  bool reference_run = true;          // source-off run for tau_off
  double reference_duration_s = 0.0;  // 0: same as the main run
};

struct QuantumJumpReport {
  JumpAnalysis on;
  std::optional<JumpAnalysis> off;
  std::optional<RateEstimate> rate;
  CorrelationHistogram g2;
  std::optional<double> significance;
  double configured_added_rate = 0.0;
  GroundTruthLog truth;  // main run
};

/// Simulates scheme A or B, extracts the jump photons (first photon of
/// dark->bright jumps for B, last photon of bright->dark jumps for A) and
/// correlates them with the herald channel.
QuantumJumpReport run_quantum_jump_experiment(const TrajectoryConfig& cfg,
                                              const QuantumJumpSettings& settings = {});

/// Source and ion defaults for the gated polarization-controlled experiments.
TrajectoryConfig pulsed_absorption_defaults();

struct PolarizationSetting {
  std::string label;
  double x;
  PolarizationState photon;
};

/// V light after a quarter-wave plate at each angle (degrees).
std::vector<PolarizationSetting> qwp_settings(std::span<const double> qwp_deg);

struct ScanResult {
  std::vector<ScanPoint> points;
  std::optional<FitResult> fit;
};

/// Coincidence peak versus the polarization sent to the ion (PBS splitter).
/// The fit is a line of net counts against the expected overlap.
ScanResult run_polarization_scan(const TrajectoryConfig& base,
                                 std::span<const PolarizationSetting> settings,
                                 const CoincidenceSettings& coinc = {});

struct SpectroscopyResult {
  ScanResult lower;  // pumped to the lower Zeeman pair, sigma+ light
  ScanResult upper;  // pumped to the upper pair, sigma- light
};

/// Coincidence rate versus herald filter detuning; x is the selected signal
/// detuning (MHz), y the background-subtracted rate, fitted by Lorentzians.
SpectroscopyResult run_spectroscopy_scan(const TrajectoryConfig& base,
                                         std::span<const double> filter_detunings_mhz,
                                         const CoincidenceSettings& coinc = {});

enum class Basis { RL, HV, DA };
std::string_view basis_name(Basis b);

/// Coincidences versus herald HWP angle (degrees) with an NPBS splitter; the
/// ion accepts L, H or D. Fitted by a sinusoid of period 90 degrees.
ScanResult run_entanglement_scan(const TrajectoryConfig& base, Basis basis,
                                 std::span<const double> hwp_deg,
                                 const CoincidenceSettings& coinc = {});

struct CoincidenceCalibration {
  double pair_rate;
  double herald_efficiency;
  double absorption_peak_rate;
  double expected_peak;        // counts in the zero-lag bin
  double expected_background;  // accidentals per bin
};

/// Source settings for a continuous scheme B run whose zero-lag g2 bin is
/// expected to hold `peak` counts over `background` accidentals per bin, with
/// SPDC absorption adding `added_rate` to the dark-state decay rate.
CoincidenceCalibration calibrate_coincidence_run(const TrajectoryConfig& base, double added_rate,
                                                 double peak, double background, double bin_s);

}  // namespace ionabsorb
