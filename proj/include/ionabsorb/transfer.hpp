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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ionabsorb/atomic_model.hpp"
#include "ionabsorb/fitting.hpp"
#include "ionabsorb/polarization.hpp"
#include "ionabsorb/random.hpp"
#include "ionabsorb/trajectory.hpp"

namespace ionabsorb {

enum class PhaseKind { cooling, optical_pump, rf_pulse, pulse_729, exposure, detection };

struct PulsePhase {
  PhaseKind kind;
  std::string name;
  double duration_s;
  double pulse_area_rad = 0.0;  // coherent pulses
  int twice_m_s = 0;            // 729 nm pulses: S1/2 sublevel addressed (doubled)
  int twice_m_d = 0;            // ... and the D5/2 sublevel it is coupled to
};

/// Ordered, non-overlapping phases of one experimental cycle.
struct PulseSequence {
  std::vector<PulsePhase> phases;

  void validate() const;  // usage error for non-positive durations
  double period() const;

  /// Cooling, sigma- 397 pumping, RF pi/2, two 729 pi pulses, exposure.
  /// Every coherent pulse area is scaled by (1 + area_error).
  static PulseSequence transfer(double area_error = 0.0, double exposure_s = 10e-6);
  /// Cooling, polarized 854 pumping and gated detection.
  static PulseSequence pulsed_absorption(const PulsedDetection& p = {});
};

/// Qubit over {|S1/2,-1/2>, |S1/2,+1/2>} with Zeeman phase bookkeeping: the
/// |+> amplitude advances by 2 pi splitting t relative to |->.
class IonQubitState {
 public:
  IonQubitState() : IonQubitState(1.0, 0.0) {}
  /// Normalises; throws usage error for a zero vector.
  IonQubitState(std::complex<double> minus, std::complex<double> plus, double splitting_mhz = 0.0);

  std::complex<double> minus() const { return amp_(0); }
  std::complex<double> plus() const { return amp_(1); }
  const Eigen::Vector2cd& amplitudes() const { return amp_; }
  double splitting_mhz() const { return splitting_mhz_; }
  double accumulated_phase_rad() const { return phase_; }

  /// Free evolution for `elapsed_s` (negative undoes it).
  IonQubitState evolved(double elapsed_s) const;
  /// Removes the phase accumulated over `elapsed_s`.
  IonQubitState phase_corrected(double elapsed_s) const { return evolved(-elapsed_s); }

  double fidelity(const IonQubitState& target) const;

 private:
  Eigen::Vector2cd amp_;
  double splitting_mhz_;
  double phase_ = 0.0;
};

/// Amplitudes over {S-1/2, S+1/2, D5/2 -3/2, D5/2 +3/2}.
struct TransferRegister {
  Eigen::Vector4cd amp;
  double d_population() const { return amp.tail<2>().squaredNorm(); }
  /// |<target|psi>|^2 for target (|D-3/2> + |D+3/2>)/sqrt 2.
  double preparation_fidelity() const;
  /// Relative phase of D+3/2 with respect to D-3/2.
  double relative_phase() const;
};

/// Ideal unitaries for the preparation pulses in sequence order; the sequence
/// must contain a sigma- 397 pumping phase, an RF pulse and two 729 nm pulses.
TransferRegister prepare_transfer_state(const PulseSequence& sequence);

struct TransferConfig {
  double pulse_area_error = 0.0;  // relative, applied to every coherent pulse
  double zeeman_splitting_mhz = 10.0;
  JitterModel jitter{};
  bool phase_tracking = true;
  double absorption_probability = 1.0;  // per exposed photon
  double detection_efficiency_393 = 1.0;
  double exposure_s = 10e-6;
  std::uint64_t master_seed = 1;

  void validate() const;
};

struct TransferOutcome {
  bool heralded = false;
  double herald_time_s = 0.0;  // recorded, including detector delay
  std::optional<IonQubitState> output;
  std::optional<double> fidelity;
};

/// Ideal mapping sigma+ -> |S,-1/2>, sigma- -> |S,+1/2>.
IonQubitState transfer_target(const PolarizationState& photon);

/// One exposure: absorption, Raman decay and 393 nm herald detection.
TransferOutcome absorb_and_herald(const TransferRegister& prepared, const PolarizationState& photon,
                                  const TransferConfig& cfg, const TransitionTable& table,
                                  RngStream& rng);

/// Haar-random photon polarization.
PolarizationState haar_random_polarization(RngStream& rng);

struct FidelityReport {
  double mean_fidelity;
  double error;  // standard error of the mean
  double success_probability;
  std::size_t inputs;
  std::size_t attempts;
  std::vector<double> fidelities;
};

/// Each Haar-random input is retried until heralded; inputs depend only on the
/// master seed and input index.
FidelityReport transfer_fidelity_experiment(const TransferConfig& cfg, std::size_t n_inputs);

struct EfficiencyScan {
  std::vector<double> efficiencies;
  std::vector<FidelityReport> reports;
  std::optional<FitResult> fit;  // mean fidelity against efficiency; needs >= 3 points
};

/// Repeats the fidelity experiment at each 393 nm detection efficiency with an
/// independent seed per point, so the line fit sees uncorrelated errors.
EfficiencyScan transfer_efficiency_scan(const TransferConfig& cfg,
                                        std::span<const double> efficiencies, std::size_t n_inputs);

/// Coherence left by Gaussian herald timing jitter: exp(-(2 pi splitting sigma)^2 / 2).
double jitter_dephasing_factor(double splitting_mhz, double sigma_s);

}  // namespace ionabsorb
