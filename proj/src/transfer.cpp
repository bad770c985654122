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

#include "ionabsorb/transfer.hpp"

#include <cmath>
#include <numbers>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
enum : int { kSm = 0, kSp = 1, kDm = 2, kDp = 3 };

int s_index(int twice_m) { return twice_m < 0 ? kSm : kSp; }
int d_index(int twice_m) { return twice_m < 0 ? kDm : kDp; }

// Real rotation by `area` between two register components.
void rotate(Eigen::Vector4cd& v, int a, int b, double area) {
  const double c = std::cos(0.5 * area), s = std::sin(0.5 * area);
  std::complex<double> va = v(a), vb = v(b);
  v(a) = c * va - s * vb;
  v(b) = s * va + c * vb;
}

}  // namespace

void PulseSequence::validate() const {
  for (const auto& p : phases)
    if (!(p.duration_s > 0.0))
      throw usage_error("pulse phase '" + p.name + "' needs a positive duration");
}

double PulseSequence::period() const {
  double t = 0.0;
  for (const auto& p : phases) t += p.duration_s;
  return t;
}

PulseSequence PulseSequence::transfer(double area_error, double exposure_s) {
  const double k = 1.0 + area_error;
  const double pi = std::numbers::pi;
  return {{
      {PhaseKind::cooling, "cool_397_866", 5e-3},
      {PhaseKind::optical_pump, "pump_397_sigma_minus", 20e-6},
      {PhaseKind::rf_pulse, "rf_pi_half", 10e-6, 0.5 * pi * k},
      {PhaseKind::pulse_729, "729_pi_minus", 5e-6, pi * k, -1, -3},
      {PhaseKind::pulse_729, "729_pi_plus", 5e-6, pi * k, 1, 3},
      {PhaseKind::exposure, "expose_854", exposure_s},
  }};
}

PulseSequence PulseSequence::pulsed_absorption(const PulsedDetection& p) {
  return {{
      {PhaseKind::cooling, "cool_397_866_850_854", p.cool_s},
      {PhaseKind::optical_pump, "pump_854_circular", p.pump_s},
      {PhaseKind::detection, "detect_397_866", p.detect_s},
  }};
}

IonQubitState::IonQubitState(std::complex<double> minus, std::complex<double> plus,
                             double splitting_mhz)
    : amp_(minus, plus), splitting_mhz_(splitting_mhz) {
  double n = amp_.norm();
  if (!(n > 0.0)) throw usage_error("qubit state must be nonzero");
  amp_ /= n;
}

IonQubitState IonQubitState::evolved(double elapsed_s) const {
  IonQubitState out = *this;
  double phi = kTwoPi * splitting_mhz_ * 1e6 * elapsed_s;
  out.amp_(1) *= std::polar(1.0, phi);
  out.phase_ += phi;
  return out;
}

double IonQubitState::fidelity(const IonQubitState& target) const {
  return std::min(std::norm(target.amp_.dot(amp_)), 1.0);
}

double TransferRegister::preparation_fidelity() const {
  std::complex<double> o = (amp(kDm) + amp(kDp)) / std::numbers::sqrt2;
  return std::norm(o);
}

double TransferRegister::relative_phase() const { return std::arg(amp(kDp) / amp(kDm)); }

TransferRegister prepare_transfer_state(const PulseSequence& sequence) {
  sequence.validate();
  std::vector<const PulsePhase*> coherent;
  bool pumped = false;
  for (const auto& p : sequence.phases) {
    switch (p.kind) {
      case PhaseKind::optical_pump:
        if (!coherent.empty())
          throw usage_error("optical pumping must precede the coherent pulses");
        pumped = true;
        break;
      case PhaseKind::rf_pulse:
      case PhaseKind::pulse_729:
        coherent.push_back(&p);
        break;
      default:
        break;
    }
  }
  if (!pumped || coherent.size() != 3 || coherent[0]->kind != PhaseKind::rf_pulse ||
      coherent[1]->kind != PhaseKind::pulse_729 || coherent[2]->kind != PhaseKind::pulse_729)
    throw usage_error("transfer preparation needs pumping, one RF pulse and two 729 nm pulses");
  for (int i : {1, 2}) {
    const PulsePhase& p = *coherent[i];
    if (std::abs(p.twice_m_s) != 1 || std::abs(p.twice_m_d) != 3 ||
        (p.twice_m_s > 0) != (p.twice_m_d > 0))
      throw usage_error("729 nm pulse '" + p.name + "' must couple S(+-1/2) to D5/2(+-3/2)");
  }
  if (coherent[1]->twice_m_s == coherent[2]->twice_m_s)
    throw usage_error("the two 729 nm pulses must address different S1/2 sublevels");

  TransferRegister r{Eigen::Vector4cd::Zero()};
  r.amp(kSm) = 1.0;
  rotate(r.amp, kSm, kSp, coherent[0]->pulse_area_rad);
  for (int i : {1, 2}) {
    const PulsePhase& p = *coherent[i];
    rotate(r.amp, s_index(p.twice_m_s), d_index(p.twice_m_d), p.pulse_area_rad);
  }
  return r;
}

void TransferConfig::validate() const {
  auto unit = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw usage_error(std::string(what) + " must lie in [0, 1]");
  };
  unit(absorption_probability, "transfer.absorption_probability");
  unit(detection_efficiency_393, "transfer.detection_efficiency_393");
  if (!(exposure_s > 0.0)) throw usage_error("transfer.exposure must be > 0");
  if (!std::isfinite(zeeman_splitting_mhz) || !std::isfinite(pulse_area_error))
    throw usage_error("transfer parameters must be finite");
  if (!(jitter.fwhm_s >= 0.0)) throw usage_error("transfer.jitter_fwhm must be >= 0");
}

IonQubitState transfer_target(const PolarizationState& photon) {
  HelicityAmplitudes h = photon.helicity({0.0, 0.0, 1.0});
  return {h.sigma_plus, h.sigma_minus};
}

TransferOutcome absorb_and_herald(const TransferRegister& prepared, const PolarizationState& photon,
                                  const TransferConfig& cfg, const TransitionTable& table,
                                  RngStream& rng) {
  const auto& k = photon.direction();
  if (std::abs(k[2] - 1.0) > 1e-12)
    throw usage_error("transfer photon must propagate along the quantization axis");
  const HelicityAmplitudes h = photon.helicity({0.0, 0.0, 1.0});

  // D-3/2 absorbs sigma+ into P-1/2, D+3/2 absorbs sigma- into P+1/2; the
  // heralded pi decays return to S-1/2 and S+1/2 respectively.
  const double c_minus = std::sqrt(table.coupling({Term::D5_2, -3}, {Term::P3_2, -1}, 1) *
                                   table.coupling({Term::S1_2, -1}, {Term::P3_2, -1}, 0));
  const double c_plus = std::sqrt(table.coupling({Term::D5_2, 3}, {Term::P3_2, 1}, -1) *
                                  table.coupling({Term::S1_2, 1}, {Term::P3_2, 1}, 0));
  const std::complex<double> u_minus = prepared.amp(kDm) * h.sigma_plus * c_minus;
  const std::complex<double> u_plus = prepared.amp(kDp) * h.sigma_minus * c_plus;

  // Absorbing population relative to the ideal half-and-half preparation.
  const double absorbing = 2.0 * (std::norm(prepared.amp(kDm) * h.sigma_plus) +
                                  std::norm(prepared.amp(kDp) * h.sigma_minus));
  const double p = std::min(1.0, cfg.absorption_probability * table.ratios().p32_to_s *
                                     cfg.detection_efficiency_393 * absorbing);

  TransferOutcome out;
  if (!rng.bernoulli(p) || std::norm(u_minus) + std::norm(u_plus) == 0.0) return out;

  const double t_abs = cfg.exposure_s * rng.uniform();
  const double t_emit = t_abs + rng.exponential(1.0 / level(Term::P3_2).lifetime_s);
  const double t_rec = t_emit + cfg.jitter.offset_s() + detector_jitter(cfg.jitter, rng);

  IonQubitState state = IonQubitState(u_minus, u_plus, cfg.zeeman_splitting_mhz).evolved(t_emit);
  if (cfg.phase_tracking) state = state.phase_corrected(t_rec - cfg.jitter.offset_s());
  out.heralded = true;
  out.herald_time_s = t_rec;
  out.fidelity = state.fidelity(transfer_target(photon));
  out.output = state;
  return out;
}

PolarizationState haar_random_polarization(RngStream& rng) {
  std::complex<double> a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
  return {a, b};
}

FidelityReport transfer_fidelity_experiment(const TransferConfig& cfg, std::size_t n_inputs) {
  cfg.validate();
  if (n_inputs == 0) throw usage_error("transfer experiment needs at least one input");
  const TransitionTable table;
  const TransferRegister prepared =
      prepare_transfer_state(PulseSequence::transfer(cfg.pulse_area_error, cfg.exposure_s));
  if (cfg.absorption_probability * cfg.detection_efficiency_393 * prepared.d_population() == 0.0)
    throw usage_error("transfer can never be heralded with zero efficiency");

  FidelityReport rep{0.0, 0.0, 0.0, n_inputs, 0, {}};
  rep.fidelities.reserve(n_inputs);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    RngStream in_rng(cfg.master_seed, stream_key(streams::inputs, i));
    RngStream rng(cfg.master_seed, stream_key(streams::protocol, i));
    const PolarizationState photon = haar_random_polarization(in_rng);
    for (std::size_t tries = 0;; ++tries) {
      if (tries == 100'000'000) throw numeric_error("transfer input was never heralded");
      ++rep.attempts;
      TransferOutcome o = absorb_and_herald(prepared, photon, cfg, table, rng);
      if (o.heralded) {
        rep.fidelities.push_back(*o.fidelity);
        break;
      }
    }
  }
  double sum = 0.0, sq = 0.0;
  for (double f : rep.fidelities) sum += f;
  rep.mean_fidelity = sum / n_inputs;
  for (double f : rep.fidelities) sq += (f - rep.mean_fidelity) * (f - rep.mean_fidelity);
  rep.error = n_inputs > 1 ? std::sqrt(sq / (n_inputs - 1) / n_inputs) : 0.0;
  rep.success_probability = static_cast<double>(n_inputs) / rep.attempts;
  return rep;
}

EfficiencyScan transfer_efficiency_scan(const TransferConfig& cfg,
                                        std::span<const double> efficiencies,
                                        std::size_t n_inputs) {
  EfficiencyScan scan;
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < efficiencies.size(); ++i) {
    TransferConfig c = cfg;
    c.detection_efficiency_393 = efficiencies[i];
    c.master_seed = derive_stream_seed(cfg.master_seed, stream_key(streams::protocol, i));
    FidelityReport r = transfer_fidelity_experiment(c, n_inputs);
    // A noiseless run has zero spread; keep the weights finite.
    pts.push_back({efficiencies[i], r.mean_fidelity, std::max(r.error, 1e-15)});
    scan.efficiencies.push_back(efficiencies[i]);
    scan.reports.push_back(std::move(r));
  }
  if (pts.size() >= 3) scan.fit = fit_line(pts);
  return scan;
}

double jitter_dephasing_factor(double splitting_mhz, double sigma_s) {
  double x = kTwoPi * splitting_mhz * 1e6 * sigma_s;
  return std::exp(-0.5 * x * x);
}

}  // namespace ionabsorb
