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
#include <string_view>
#include <vector>

#include "ionabsorb/atomic_model.hpp"
#include "ionabsorb/photon_source.hpp"
#include "ionabsorb/polarization.hpp"
#include "ionabsorb/random.hpp"
#include "ionabsorb/timetag.hpp"

namespace ionabsorb {

// Absorption detection schemes: 850 nm (A, C) or 854 nm (B, D) absorption,
// signalled by a quantum jump (A, B) or a single 393 nm photon (C, D).
enum class Scheme { A, B, C, D };

enum class IonPreparation {
  unpolarized,   // D5/2 populated incoherently; every polarization absorbed alike
  pumped_lower,  // D5/2 m = -5/2, -3/2: absorbs sigma+ only
  pumped_upper,  // D5/2 m = +5/2, +3/2: absorbs sigma- only
  custom,        // accepts `accepted_polarization`, resonance unshifted
};

std::string_view scheme_name(Scheme s);
std::string_view preparation_name(IonPreparation p);

/// Cool / pump / detect cycle for gated polarization-controlled absorption.
/// Detectors are live only during the detect phase; a marker tag opens it.
struct PulsedDetection {
  double cool_s = 5e-3;
  double pump_s = 0.5e-3;
  double detect_s = 3e-3;
  double period() const { return cool_s + pump_s + detect_s; }
  bool operator==(const PulsedDetection&) const = default;
};

struct JitterModel {
  double fwhm_s = 1e-9;
  double sigma_s() const;
  /// Fixed delay added to every jittered tag so delays stay non-negative.
  double offset_s() const { return 5.0 * sigma_s(); }
  bool operator==(const JitterModel&) const = default;
};

/// Gaussian detector delay, truncated at +-5 sigma (zero for zero width).
double detector_jitter(const JitterModel& model, RngStream& rng);

struct TrajectoryConfig {
  Scheme scheme = Scheme::B;
  double duration_s = 100.0;
  double r_on = 5e4;           // detected fluorescence rate, bright state
  double r_dark = 100.0;       // detector dark counts
  double pump_rate_850 = 1.0;  // bright -> dark pumping, scheme B
  double tau0_s = 1.11;        // D5/2 lifetime
  SourceConfig source{};
  // SPDC-induced absorption rate on the 854 nm line for a source locked to
  // resonance and matched polarization; 850 nm schemes scale it down by the
  // oscillator strength ratio.
  double absorption_peak_rate = 0.0;
  double atom_fwhm_mhz = 22.0;
  double detection_efficiency_393 = 0.5;
  MagneticField field{};
  IonPreparation preparation = IonPreparation::unpolarized;
  PolarizationState accepted_polarization = PolarizationState::L();
  std::optional<PulsedDetection> pulsed;
  double cycle_period_s = 1e-3;  // re-preparation period for schemes C and D
  JitterModel jitter{};
  std::uint32_t tick_ps = 1000;
  std::uint64_t master_seed = 1;

  void validate() const;
};

/// Spectral and polarization acceptance of the prepared ion.
struct AbsorptionProfile {
  struct Component {
    double weight;
    double center_mhz;  // resonance relative to the zero-field line
  };
  std::vector<Component> components;
  double fwhm_mhz = 22.0;
  std::optional<PolarizationState> accepted;

  /// Relative absorption for a monochromatic photon (1 at an isolated resonance).
  double spectral(double photon_detuning_mhz) const;
  /// <a|rho|a>, or the trace for an unpolarized ion.
  double polarization(const Eigen::Matrix2cd& rho) const;
};

AbsorptionProfile absorption_profile(const TrajectoryConfig& cfg, const TransitionTable& table);

/// Per-photon absorption probability at resonance with matched polarization.
double peak_absorption_probability(const TrajectoryConfig& cfg, const TransitionTable& table);

/// Mean SPDC absorption rate while the ion is in its absorbing state.
double spdc_absorption_rate(const TrajectoryConfig& cfg, const TransitionTable& table);

/// Rate at which SPDC absorptions change the fluorescence state (schemes A, B).
double expected_added_rate(const TrajectoryConfig& cfg, const TransitionTable& table);

/// Efficiency of scheme B relative to scheme A:
/// strength ratio x branching(P3/2 -> S1/2) / branching(P3/2 -> D5/2).
double relative_scheme_efficiency(const TransitionTable& table);

enum class IonLevel { S, D3_2, D5_2 };
enum class TransitionCause { spontaneous, spdc_absorption, pump, protocol_pulse };

std::string_view ion_level_name(IonLevel l);
std::string_view cause_name(TransitionCause c);

struct GroundTruthTransition {
  double time_s;
  IonLevel from;
  IonLevel to;
  TransitionCause cause;
  bool heralded;  // absorbed photon's partner was detected
};

struct GroundTruthLog {
  std::vector<GroundTruthTransition> transitions;
  std::size_t absorptions = 0;           // all SPDC absorptions
  std::size_t heralded_absorptions = 0;  // ... whose partner was detected
  std::size_t emitted_393 = 0;
  std::size_t detected_393 = 0;
};

/// One pair that produced a herald or was an absorption candidate.
struct RelevantPair {
  double time_s;
  double signal_detuning_mhz;
  bool heralded;
  bool absorption_candidate;
  bool absorbed;
};

struct SimulationResult {
  TimeTagStream stream;
  GroundTruthLog truth;
  std::vector<RelevantPair> pairs;
};

SimulationResult simulate(const TrajectoryConfig& cfg);
SimulationResult simulate(const TrajectoryConfig& cfg, const TransitionTable& table);

}  // namespace ionabsorb
