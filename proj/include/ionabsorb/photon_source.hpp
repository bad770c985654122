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
#include <optional>
#include <vector>

#include "ionabsorb/polarization.hpp"
#include "ionabsorb/random.hpp"

namespace ionabsorb {

enum class BellState { psi_plus, psi_minus, phi_plus, phi_minus };

/// Two-photon polarization density matrix.
///
/// Basis order is {HH, HV, VH, VV} with the first factor the signal photon
/// (sent to the ion) and the second the herald photon.
class PairPolarizationState {
 public:
  PairPolarizationState() : PairPolarizationState(bell(BellState::psi_plus)) {}
  /// Validates hermiticity, unit trace and positivity (tolerance 1e-12).
  explicit PairPolarizationState(const Eigen::Matrix4cd& rho);

  static PairPolarizationState product(const PolarizationState& signal,
                                       const PolarizationState& herald);
  static PairPolarizationState bell(BellState which);
  /// p |Bell><Bell| + (1 - p) I/4.
  static PairPolarizationState werner(double p, BellState which = BellState::psi_plus);

  const Eigen::Matrix4cd& density() const { return rho_; }
  Eigen::Matrix2cd signal_marginal() const;
  Eigen::Matrix2cd herald_marginal() const;

 private:
  Eigen::Matrix4cd rho_;
};

struct PartnerProjection {
  double probability;
  Eigen::Matrix2cd partner;  // normalised signal density matrix

  double purity() const { return (partner * partner).trace().real(); }
  /// Dominant eigenvector; exact for pure partners.
  PolarizationState dominant_state() const;
};

/// Born-rule probability that the herald passes the given polarization and the
/// conditional signal state. Throws usage error for a zero-probability outcome.
PartnerProjection project_pair(const PairPolarizationState& state,
                               const PolarizationState& herald_outcome);
/// Analyzer overload; a disabled analyzer yields (1, signal marginal).
PartnerProjection project_pair(const PairPolarizationState& state, const Analyzer& analyzer);

enum class Splitter { pbs, npbs };

struct SourceConfig {
  double pair_rate = 0.0;            // pairs / s
  double raw_bandwidth_ghz = 200.0;  // FWHM of the SPDC spectrum
  double filter_fwhm_mhz = 22.0;     // herald filter cavity
  double filter_detuning_mhz = 0.0;  // filter center relative to the atomic line
  double pump_offset_mhz = 0.0;      // signal + idler detuning = -2 * pump offset
  double herald_efficiency = 1.0;
  Splitter splitter = Splitter::pbs;
  PairPolarizationState pair_state{};
  PolarizationState signal_polarization = PolarizationState::V();  // PBS arm preparation
  Analyzer herald_analyzer{};

  void validate() const;

  /// State after the splitter: PBS sends H to the herald arm and the prepared
  /// signal polarization to the ion; NPBS keeps the pair state.
  PairPolarizationState effective_pair_state() const;
};

/// Raw spectrum is truncated at +-5 FWHM.
inline constexpr double kRawSpectrumTruncation = 5.0;

struct PairEvent {
  double time_s;
  double signal_detuning_mhz;
  double idler_detuning_mhz;
  bool herald_detected;
  Eigen::Matrix2cd signal_state;  // conditioned on the herald outcome
  std::optional<PolarizationState> conditional_signal_polarization;  // set when heralded
};

/// Peak-normalised Lorentzian transmission of the herald filter.
double filter_transmission(double detuning_mhz, double fwhm_mhz);

/// Normalised density (per MHz) of the truncated raw idler spectrum.
double idler_density(const SourceConfig& cfg, double idler_detuning_mhz);

/// Fraction of pairs whose idler passes the filter (efficiency and analyzer excluded).
double filter_pass_fraction(const SourceConfig& cfg);

/// Every pair emitted within [0, duration): a homogeneous Poisson process.
std::vector<PairEvent> generate_pairs(const SourceConfig& cfg, double duration_s, RngStream& rng);

/// Adaptive Simpson quadrature over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int depth = 50);

}  // namespace ionabsorb

#include "ionabsorb/detail/quadrature.hpp"
