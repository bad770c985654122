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

#include "ionabsorb/protocols.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

std::uint64_t point_seed(std::uint64_t master, std::uint64_t group, std::uint64_t index) {
  return derive_stream_seed(master, stream_key(streams::protocol, (group << 20) | index));
}

std::string label_number(double v) {
  std::array<char, 32> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), p);
}

void require_pulsed(const TrajectoryConfig& cfg) {
  if (!cfg.pulsed) throw usage_error("scan protocols need the pulsed detection sequence");
}

// Simulates one gated scan point and counts herald / first-photon coincidences.
ScanPoint gated_point(const TrajectoryConfig& cfg, const CoincidenceSettings& coinc) {
  SimulationResult sim = simulate(cfg);
  const TimeTagStream& s = sim.stream;
  const double tau_th = optimal_delay_threshold(cfg.r_on, std::max(cfg.r_dark, 1e-3));
  std::vector<std::uint64_t> signals = gated_first_photons(s, cfg.pulsed->detect_s, tau_th);
  std::vector<std::uint64_t> heralds = s.channel_ticks(channel::herald);
  std::uint64_t bin = std::max<std::uint64_t>(1, s.to_ticks(coinc.bin_s));
  CorrelationHistogram h = g2(heralds, signals, bin, coinc.half_bins, s.tick_seconds());
  ScanPoint p;
  p.coincidences = coincidence_count(h, coinc.window_bins, cfg.pulsed->detect_s);
  p.heralds = heralds.size();
  p.signals = signals.size();
  return p;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

std::vector<double> bright_durations(const JumpAnalysis& ja, double tick_s) {
  std::vector<double> up, down;
  for (const auto& e : ja.to_bright)
    if (e.transition_tick) up.push_back(*e.transition_tick * tick_s);
  for (const auto& e : ja.to_dark)
    if (e.transition_tick) down.push_back(*e.transition_tick * tick_s);
  return dark_period_durations(up, down);
}

}  // namespace

CoincidenceCount coincidence_count(const CorrelationHistogram& h, std::int64_t window_bins,
                                   std::optional<double> gate_s) {
  if (window_bins < 0 || window_bins + 1 >= h.half_bins)
    throw usage_error("coincidence window must leave off-peak bins in the histogram");
  if (gate_s && !(*gate_s > 0.0)) throw usage_error("gate length must be > 0");
  // Accidentals between two gated records scale with the window overlap 1 - |lag| / gate.
  auto weight = [&](std::int64_t k) {
    if (!gate_s) return 1.0;
    return std::max(0.0, 1.0 - std::abs(h.lag_s(k)) / *gate_s);
  };
  double off_counts = 0.0, off_weight = 0.0, win_weight = 0.0;
  for (std::int64_t k = -h.half_bins; k <= h.half_bins; ++k) {
    if (std::abs(k) <= window_bins) win_weight += weight(k);
    if (std::abs(k) > 1) {
      off_counts += static_cast<double>(h.at(k));
      off_weight += weight(k);
    }
  }
  if (!(off_weight > 0.0)) throw usage_error("histogram extends beyond the detection gate");
  CoincidenceCount c;
  const double per_weight = off_counts / off_weight;
  c.counts = h.central_sum(window_bins);
  c.background = per_weight * win_weight;
  c.net = c.counts - c.background;
  c.error = std::sqrt(std::max<double>(c.counts, 1.0) +
                      win_weight * win_weight * per_weight / off_weight);
  return c;
}

QuantumJumpReport run_quantum_jump_experiment(const TrajectoryConfig& cfg,
                                              const QuantumJumpSettings& settings) {
  if (cfg.scheme != Scheme::A && cfg.scheme != Scheme::B)
    throw usage_error("quantum-jump experiment needs scheme A or B");
  if (cfg.pulsed) throw usage_error("quantum-jump experiment needs continuous detection");
  const TransitionTable table;
  SimulationResult sim = simulate(cfg, table);
  const TimeTagStream& s = sim.stream;

  QuantumJumpReport rep{analyze_jumps(s, cfg.duration_s, settings.analysis),
                        std::nullopt,
                        std::nullopt,
                        {},
                        std::nullopt,
                        expected_added_rate(cfg, table),
                        std::move(sim.truth)};
  std::vector<std::uint64_t> signals;
  if (cfg.scheme == Scheme::B) {
    signals = rep.on.first_photon_ticks();
  } else {
    for (const auto& e : rep.on.to_dark)
      if (e.transition_tick) signals.push_back(*e.transition_tick);
  }
  const std::uint64_t bin = std::max<std::uint64_t>(1, s.to_ticks(settings.g2_bin_s));
  rep.g2 =
      g2(s.channel_ticks(channel::herald), signals, bin, settings.g2_half_bins, s.tick_seconds());
  if (rep.g2.background > 0.0) rep.significance = peak_significance(rep.g2);

  if (cfg.scheme == Scheme::A) {
    // Bright periods end only through absorption: their rate is the added rate.
    std::vector<double> bright = bright_durations(rep.on, s.tick_seconds());
    if (bright.size() >= 2) {
      FitResult f = fit_exponential(bright);
      double tau = f.value("tau");
      rep.rate = RateEstimate{1.0 / tau, f.error("tau") / (tau * tau)};
    }
    return rep;
  }
  if (settings.reference_run) {
    TrajectoryConfig off = cfg;
    off.source.pair_rate = 0.0;
    off.master_seed = point_seed(cfg.master_seed, 0, 0);
    if (settings.reference_duration_s > 0.0) off.duration_s = settings.reference_duration_s;
    SimulationResult ref = simulate(off, table);
    rep.off = analyze_jumps(ref.stream, off.duration_s, settings.analysis);
    if (rep.on.dark_fit && rep.off->dark_fit)
      rep.rate = derived_absorption_rate(*rep.on.dark_fit, *rep.off->dark_fit);
  }
  return rep;
}

TrajectoryConfig pulsed_absorption_defaults() {
  TrajectoryConfig c;
  c.scheme = Scheme::B;
  c.duration_s = 100.0;
  c.pulsed = PulsedDetection{};
  c.pump_rate_850 = 0.0;
  c.source.pair_rate = 1e6;
  c.source.herald_efficiency = 1.0;
  c.absorption_peak_rate = 50.0;
  c.preparation = IonPreparation::pumped_lower;
  return c;
}

std::vector<PolarizationSetting> qwp_settings(std::span<const double> qwp_deg) {
  std::vector<PolarizationSetting> out;
  for (double a : qwp_deg) {
    PolarizationState p =
        PolarizationState::V().transformed(quarter_wave_plate(a * std::numbers::pi / 180.0));
    out.push_back({"qwp_" + label_number(a), a, p});
  }
  return out;
}

ScanResult run_polarization_scan(const TrajectoryConfig& base,
                                 std::span<const PolarizationSetting> settings,
                                 const CoincidenceSettings& coinc) {
  require_pulsed(base);
  const TransitionTable table;
  ScanResult res;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    TrajectoryConfig cfg = base;
    cfg.source.splitter = Splitter::pbs;
    cfg.source.signal_polarization = settings[i].photon;
    cfg.master_seed = point_seed(base.master_seed, 1, i);
    AbsorptionProfile prof = absorption_profile(cfg, table);
    ScanPoint p = gated_point(cfg, coinc);
    p.label = settings[i].label;
    p.x = settings[i].x;
    p.expected = prof.polarization(settings[i].photon.projector());
    res.points.push_back(std::move(p));
  }
  if (res.points.size() >= 3) {
    std::vector<DataPoint> d;
    for (const auto& p : res.points)
      d.push_back({p.expected, p.coincidences.net, p.coincidences.error});
    res.fit = fit_line(d);
  }
  return res;
}

SpectroscopyResult run_spectroscopy_scan(const TrajectoryConfig& base,
                                         std::span<const double> filter_detunings_mhz,
                                         const CoincidenceSettings& coinc) {
  require_pulsed(base);
  const TransitionTable table;
  SpectroscopyResult out;
  for (int side = 0; side < 2; ++side) {
    ScanResult& res = side == 0 ? out.lower : out.upper;
    TrajectoryConfig cfg = base;
    cfg.preparation = side == 0 ? IonPreparation::pumped_lower : IonPreparation::pumped_upper;
    cfg.source.splitter = Splitter::pbs;
    cfg.source.signal_polarization = side == 0 ? PolarizationState::L() : PolarizationState::R();
    const AbsorptionProfile prof = absorption_profile(cfg, table);
    const double width = prof.fwhm_mhz + cfg.source.filter_fwhm_mhz;
    for (std::size_t i = 0; i < filter_detunings_mhz.size(); ++i) {
      cfg.source.filter_detuning_mhz = filter_detunings_mhz[i];
      cfg.master_seed = point_seed(base.master_seed, 2 + side, i);
      ScanPoint p = gated_point(cfg, coinc);
      p.x = -2.0 * cfg.source.pump_offset_mhz - filter_detunings_mhz[i];
      p.label = "filter_" + label_number(filter_detunings_mhz[i]);
      for (const auto& c : prof.components)
        p.expected += c.weight * lorentzian(p.x - c.center_mhz, width);
      res.points.push_back(std::move(p));
    }
    if (res.points.size() >= 5) {
      std::vector<DataPoint> d;
      for (const auto& p : res.points)
        d.push_back(
            {p.x, p.coincidences.net / cfg.duration_s, p.coincidences.error / cfg.duration_s});
      res.fit = fit_lorentzian(d);
    }
  }
  return out;
}

std::string_view basis_name(Basis b) {
  switch (b) {
    case Basis::RL:
      return "RL";
    case Basis::HV:
      return "HV";
    case Basis::DA:
      return "DA";
  }
  return "?";
}

ScanResult run_entanglement_scan(const TrajectoryConfig& base, Basis basis,
                                 std::span<const double> hwp_deg,
                                 const CoincidenceSettings& coinc) {
  require_pulsed(base);
  ScanResult res;
  const PolarizationState accepted = basis == Basis::RL   ? PolarizationState::L()
                                     : basis == Basis::HV ? PolarizationState::H()
                                                          : PolarizationState::D();
  for (std::size_t i = 0; i < hwp_deg.size(); ++i) {
    TrajectoryConfig cfg = base;
    cfg.source.splitter = Splitter::npbs;
    cfg.preparation = IonPreparation::custom;
    cfg.accepted_polarization = accepted;
    Analyzer& an = cfg.source.herald_analyzer;
    an.enabled = true;
    an.has_qwp = basis == Basis::RL;
    an.qwp_deg = 45.0;
    an.hwp_deg = hwp_deg[i];
    cfg.master_seed = point_seed(base.master_seed, 4 + static_cast<int>(basis), i);
    ScanPoint p = gated_point(cfg, coinc);
    p.x = hwp_deg[i];
    p.label = std::string(basis_name(basis)) + "_hwp_" + label_number(hwp_deg[i]);
    Eigen::Matrix4cd proj = kron(accepted.projector(), an.accepted_state().projector());
    p.expected = (proj * cfg.source.pair_state.density()).trace().real();
    res.points.push_back(std::move(p));
  }
  if (res.points.size() >= 4) {
    std::vector<DataPoint> d;
    for (const auto& p : res.points) d.push_back({p.x, p.coincidences.net, p.coincidences.error});
    res.fit = fit_sinusoid_fixed_period(d, 90.0);
  }
  return res;
}

CoincidenceCalibration calibrate_coincidence_run(const TrajectoryConfig& base, double added_rate,
                                                 double peak, double background, double bin_s) {
  if (base.scheme != Scheme::B || base.pulsed)
    throw usage_error("coincidence calibration needs continuous scheme B");
  if (!(added_rate > 0.0 && peak > background && background > 0.0 && bin_s > 0.0))
    throw usage_error("calibration targets need added_rate > 0 and peak > background > 0");
  if (!(base.pump_rate_850 > 0.0)) throw usage_error("calibration needs pump_rate_850 > 0");
  const TransitionTable table;
  TrajectoryConfig cfg = base;
  cfg.source.pair_rate = 1e6;
  cfg.source.herald_efficiency = 1.0;
  cfg.absorption_peak_rate = 1.0;
  const double unit_rate = expected_added_rate(cfg, table);
  if (!(unit_rate > 0.0)) throw numeric_error("configuration admits no SPDC absorption");

  const double tau_dark = 1.0 / (1.0 / cfg.tau0_s + added_rate);
  const double tau_bright = 1.0 / cfg.pump_rate_850;
  const double dark_fraction = tau_dark / (tau_dark + tau_bright);
  const double jump_rate = 1.0 / (tau_dark + tau_bright);

  // Herald probability of an absorbed photon per unit herald efficiency. The raw
  // spectrum is flat on the scale of the atomic and filter widths.
  const AbsorptionProfile prof = absorption_profile(cfg, table);
  const PairPolarizationState pair = cfg.source.effective_pair_state();
  const PartnerProjection proj = project_pair(pair, cfg.source.herald_analyzer);
  const double pol_ratio = proj.probability * prof.polarization(proj.partner) /
                           prof.polarization(pair.signal_marginal());
  const double gf = cfg.source.filter_fwhm_mhz, ga = prof.fwhm_mhz;
  double overlap = 0.0;
  for (const auto& c : prof.components)
    overlap +=
        c.weight * gf / (ga + gf) *
        lorentzian(c.center_mhz + cfg.source.filter_detuning_mhz + 2.0 * cfg.source.pump_offset_mhz,
                   ga + gf);
  const double herald_per_eta = overlap * pol_ratio;
  const double in_bin = -std::expm1(-cfg.r_on * 0.5 * bin_s);

  CoincidenceCalibration c{};
  c.herald_efficiency =
      (peak - background) / (added_rate * dark_fraction * cfg.duration_s * herald_per_eta * in_bin);
  if (!(c.herald_efficiency <= 1.0))
    throw numeric_error("calibration targets need a herald efficiency above 1");
  const double pass = filter_pass_fraction(cfg.source) * proj.probability;
  c.pair_rate = background / (c.herald_efficiency * pass * jump_rate * cfg.duration_s * bin_s);
  c.absorption_peak_rate = added_rate / unit_rate;
  c.expected_peak = peak;
  c.expected_background = background;
  return c;
}

}  // namespace ionabsorb
