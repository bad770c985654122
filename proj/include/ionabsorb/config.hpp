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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionabsorb/protocols.hpp"
#include "ionabsorb/trajectory.hpp"
#include "ionabsorb/transfer.hpp"

namespace ionabsorb {

/// Experiment the `report` subcommand runs; other subcommands ignore it.
enum class ExperimentKind { quantum_jump, polarization, spectroscopy, entanglement, transfer };
std::string_view experiment_kind_name(ExperimentKind k);

struct AnalysisSettings {
  JumpAnalysisConfig jumps{};
  double g2_bin_s = 100e-6;
  std::int64_t g2_half_bins = 100;
  std::uint8_t g2_channel_a = 0;
  std::uint8_t g2_channel_b = 1;
  bool g2_use_jump_photons = true;  // correlate extracted jump photons instead of raw tags
  CoincidenceSettings coincidence{};
  bool reference_run = true;
  double reference_duration_s = 0.0;
};

struct ProtocolSettings {
  std::vector<double> qwp_deg{0, 15, 30, 45, 60, 75, 90, 105, 120, 135, 150, 165, 180};
  std::vector<double> filter_detunings_mhz{-60, -50, -40, -30, -20, -10, 0, 10, 20, 30, 40, 50, 60};
  std::vector<double> hwp_deg{0, 11.25, 22.5, 33.75, 45, 56.25, 67.5, 78.75, 90};
  std::vector<Basis> bases{Basis::RL, Basis::HV, Basis::DA};
  bool calibrate = false;
  double target_added_rate = 0.581;
  double target_peak = 83.0;
  double target_background = 13.6;
};

struct TransferSettings {
  TransferConfig model{};
  std::size_t inputs = 1000;
  std::vector<double> efficiencies{1.0};
};

struct OutputSettings {
  std::string directory = ".";
  std::string prefix;
  bool stream = true;
  bool truth = true;
  bool pairs = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::quantum_jump;
  std::uint64_t seed = 1;
  TrajectoryConfig trajectory{};
  // Pair state and polarizations are kept by name so the config formats back
  // to the text it was read from.
  BellState pair_bell = BellState::psi_plus;
  double werner_p = 1.0;
  std::string signal_polarization = "V";
  std::string accepted_polarization = "L";
  bool pulsed = false;
  PulsedDetection pulsed_timing{};
  AnalysisSettings analysis{};
  ProtocolSettings protocol{};
  TransferSettings transfer{};
  OutputSettings output{};

  /// Trajectory config with the named fields and the seed resolved.
  TrajectoryConfig resolved_trajectory() const;
  TransferConfig resolved_transfer() const;
  void validate() const;
};

/// Parses the `key = value` text format with optional `[section]` headers.
/// Unknown sections or keys, malformed values and violated constraints throw
/// ConfigError carrying the line number.
ExperimentConfig parse_config(std::string_view text);

/// Applies one `section.key=value` assignment (top-level keys have no section).
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Every key, in schema order; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& cfg);

/// Reads a config file. Relative paths that do not exist are retried under
/// $IONABSORB_CONFIG_DIR.
ExperimentConfig load_config(const std::filesystem::path& path);

inline constexpr const char* kConfigDirEnv = "IONABSORB_CONFIG_DIR";

}  // namespace ionabsorb
