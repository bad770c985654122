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

#include "ionabsorb/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

constexpr double kPi = std::numbers::pi;

bool on_850_line(Scheme s) { return s == Scheme::A || s == Scheme::C; }

double signal_density(const SourceConfig& src, double signal_detuning_mhz) {
  return idler_density(src, -2.0 * src.pump_offset_mhz - signal_detuning_mhz);
}

// Integral of the signal density against a peak-normalised Lorentzian.
double lorentz_weighted_mass(const SourceConfig& src, double center, double fwhm) {
  const double g = 0.5 * fwhm;
  const double lim = kRawSpectrumTruncation * src.raw_bandwidth_ghz * 1e3;
  const double lo = -src.pump_offset_mhz - lim, hi = -src.pump_offset_mhz + lim;
  auto f = [&](double th) { return g * signal_density(src, center + g * std::tan(th)); };
  return integrate(f, std::atan((lo - center) / g), std::atan((hi - center) / g), 1e-14);
}

struct Model {
  AbsorptionProfile profile;
  double p_max = 0.0;
  PairPolarizationState pair;
  Eigen::Matrix2cd marginal;
  std::optional<PartnerProjection> heralded;  // empty if the analyzer blocks every pair
};

Model make_model(const TrajectoryConfig& cfg, const TransitionTable& table) {
  Model m{absorption_profile(cfg, table),
          peak_absorption_probability(cfg, table),
          cfg.source.effective_pair_state(),
          {},
          {}};
  m.marginal = m.pair.signal_marginal();
  try {
    m.heralded = project_pair(m.pair, cfg.source.herald_analyzer);
  } catch (const Error&) {
  }
  return m;
}

struct Window {
  double begin;
  double end;
};

std::vector<Window> live_windows(const TrajectoryConfig& cfg) {
  if (!cfg.pulsed) return {{0.0, cfg.duration_s}};
  std::vector<Window> out;
  const PulsedDetection& p = *cfg.pulsed;
  for (std::size_t k = 0;; ++k) {
    double begin = k * p.period() + p.cool_s + p.pump_s;
    if (begin >= cfg.duration_s) break;
    out.push_back({begin, std::min(begin + p.detect_s, cfg.duration_s)});
  }
  return out;
}

// Heralded pairs and unheralded absorption candidates as two independent
// thinned Poisson processes; every other pair has no observable effect.
std::vector<RelevantPair> relevant_pairs(const TrajectoryConfig& cfg, const Model& m,
                                         const std::vector<Window>& windows) {
  const SourceConfig& src = cfg.source;
  std::vector<RelevantPair> out;
  if (src.pair_rate == 0.0) return out;

  const double rho_max = idler_density(src, -src.pump_offset_mhz);
  const double p_proj = m.heralded ? m.heralded->probability : 0.0;
  const double herald_scale = src.herald_efficiency * p_proj;
  const double pol_cond = m.heralded ? m.profile.polarization(m.heralded->partner) : 0.0;
  const double pol_marg = m.profile.polarization(m.marginal);
  auto h0 = [&](double idler) {
    return src.herald_efficiency *
           filter_transmission(idler - src.filter_detuning_mhz, src.filter_fwhm_mhz);
  };

  const double rate_h = src.pair_rate * rho_max * herald_scale * kPi * 0.5 * src.filter_fwhm_mhz;
  const double rate_a =
      src.pair_rate * rho_max * m.p_max * pol_marg * kPi * 0.5 * m.profile.fwhm_mhz;

  RngStream rng_h(cfg.master_seed, streams::heralded_pairs);
  RngStream rng_a(cfg.master_seed, streams::absorbing_pairs);
  std::vector<RelevantPair> absorbing;

  for (const Window& w : windows) {
    for (double t = w.begin + rng_h.exponential(rate_h); t < w.end;
         t += rng_h.exponential(rate_h)) {
      double idler = rng_h.cauchy(src.filter_detuning_mhz, 0.5 * src.filter_fwhm_mhz);
      if (!rng_h.bernoulli(idler_density(src, idler) / rho_max)) continue;
      double signal = -2.0 * src.pump_offset_mhz - idler;
      bool cand = rng_h.bernoulli(m.p_max * m.profile.spectral(signal) * pol_cond);
      out.push_back({t, signal, true, cand, false});
    }
    for (double t = w.begin + rng_a.exponential(rate_a); t < w.end;
         t += rng_a.exponential(rate_a)) {
      double u = rng_a.uniform(), acc = 0.0;
      const auto* comp = &m.profile.components.back();
      for (const auto& c : m.profile.components) {
        acc += c.weight;
        if (u < acc) {
          comp = &c;
          break;
        }
      }
      double signal = rng_a.cauchy(comp->center_mhz, 0.5 * m.profile.fwhm_mhz);
      double idler = -2.0 * src.pump_offset_mhz - signal;
      double keep = idler_density(src, idler) / rho_max *
                    (pol_marg - h0(idler) * p_proj * pol_cond) / pol_marg;
      if (rng_a.bernoulli(keep)) absorbing.push_back({t, signal, false, true, false});
    }
  }
  std::vector<RelevantPair> merged;
  merged.reserve(out.size() + absorbing.size());
  std::merge(out.begin(), out.end(), absorbing.begin(), absorbing.end(), std::back_inserter(merged),
             [](const RelevantPair& a, const RelevantPair& b) { return a.time_s < b.time_s; });
  return merged;
}

enum class Decay { to_s, to_d32, to_d52 };

Decay sample_p32_decay(const BranchingRatios& br, RngStream& rng) {
  double u = rng.uniform();
  if (u < br.p32_to_s) return Decay::to_s;
  if (u < br.p32_to_s + br.p32_to_d32) return Decay::to_d32;
  return Decay::to_d52;
}

IonLevel decay_level(Decay d) {
  switch (d) {
    case Decay::to_s:
      return IonLevel::S;
    case Decay::to_d32:
      return IonLevel::D3_2;
    case Decay::to_d52:
      return IonLevel::D5_2;
  }
  return IonLevel::S;
}

struct IonRun {
  std::vector<Window> bright;
  std::vector<double> emitted_393;  // detected 393 nm photons, emission time
  std::vector<double> markers;
};

class IonSimulator {
 public:
  IonSimulator(const TrajectoryConfig& cfg, const TransitionTable& table,
               std::vector<RelevantPair>& pairs, GroundTruthLog& truth)
      : cfg_(cfg),
        br_(table.ratios()),
        pairs_(pairs),
        truth_(truth),
        rng_(cfg.master_seed, streams::ion),
        emit_rng_(cfg.master_seed, streams::emission) {}

  IonRun run() {
    if (cfg_.pulsed)
      run_pulsed();
    else if (cfg_.scheme == Scheme::A || cfg_.scheme == Scheme::B)
      run_continuous();
    else
      run_cycles();
    return std::move(out_);
  }

 private:
  void log(double t, IonLevel from, IonLevel to, TransitionCause cause, bool heralded = false) {
    truth_.transitions.push_back({t, from, to, cause, heralded});
  }

  // Next absorption candidate strictly after t and before `limit`, or nullptr.
  RelevantPair* next_candidate(double t, double limit) {
    while (cursor_ < pairs_.size() &&
           (pairs_[cursor_].time_s <= t || !pairs_[cursor_].absorption_candidate))
      ++cursor_;
    if (cursor_ < pairs_.size() && pairs_[cursor_].time_s < limit) return &pairs_[cursor_];
    return nullptr;
  }

  Decay absorb(RelevantPair& p) {
    p.absorbed = true;
    ++truth_.absorptions;
    if (p.heralded) ++truth_.heralded_absorptions;
    return sample_p32_decay(br_, rng_);
  }

  // Dark (D5/2) in scheme B until `end`; returns the time fluorescence resumes.
  double dark_b(double t, double end) {
    double ts = t + rng_.exponential(1.0 / cfg_.tau0_s);
    double limit = std::min(ts, end);
    while (RelevantPair* p = next_candidate(t, limit)) {
      t = p->time_s;
      Decay d = absorb(*p);
      if (d != Decay::to_d52) {
        log(t, IonLevel::D5_2, IonLevel::S, TransitionCause::spdc_absorption, p->heralded);
        return t;
      }
    }
    if (ts < end) log(ts, IonLevel::D5_2, IonLevel::S, TransitionCause::spontaneous);
    return ts;
  }

  void run_continuous() {
    const double T = cfg_.duration_s;
    bool bright = true;
    double t = 0.0;
    while (t < T) {
      if (cfg_.scheme == Scheme::B) {
        if (bright) {
          double tp = t + rng_.exponential(cfg_.pump_rate_850);
          out_.bright.push_back({t, std::min(tp, T)});
          if (tp >= T) break;
          log(tp, IonLevel::S, IonLevel::D5_2, TransitionCause::pump);
          t = tp;
        } else {
          t = dark_b(t, T);
        }
      } else {
        if (bright) {
          double start = t;
          bool jumped = false;
          while (RelevantPair* p = next_candidate(t, T)) {
            t = p->time_s;
            if (absorb(*p) == Decay::to_d52) {
              log(t, IonLevel::S, IonLevel::D5_2, TransitionCause::spdc_absorption, p->heralded);
              jumped = true;
              break;
            }
          }
          if (!jumped) t = T;
          out_.bright.push_back({start, t});
        } else {
          t += rng_.exponential(1.0 / cfg_.tau0_s);
          if (t < T) log(t, IonLevel::D5_2, IonLevel::S, TransitionCause::spontaneous);
        }
      }
      bright = !bright;
    }
  }

  void run_pulsed() {
    const PulsedDetection& p = *cfg_.pulsed;
    const double T = cfg_.duration_s;
    bool bright = true;
    for (std::size_t k = 0;; ++k) {
      double cycle = k * p.period();
      if (cycle >= T) break;
      if (!bright) {
        log(cycle, IonLevel::D5_2, IonLevel::S, TransitionCause::protocol_pulse);
        bright = true;
      }
      double pump = cycle + p.cool_s;
      if (pump >= T) break;
      log(pump, IonLevel::S, IonLevel::D5_2, TransitionCause::protocol_pulse);
      bright = false;
      double begin = pump + p.pump_s;
      if (begin >= T) break;
      double end = std::min(begin + p.detect_s, T);
      out_.markers.push_back(begin);
      double tb = dark_b(begin, end);
      if (tb < end) {
        out_.bright.push_back({tb, end});
        bright = true;
      }
    }
  }

  void run_cycles() {
    const double T = cfg_.duration_s;
    const IonLevel target = cfg_.scheme == Scheme::C ? IonLevel::D3_2 : IonLevel::D5_2;
    const Term target_term = cfg_.scheme == Scheme::C ? Term::D3_2 : Term::D5_2;
    const double decay_rate =
        cfg_.scheme == Scheme::D ? 1.0 / cfg_.tau0_s : 1.0 / level(target_term).lifetime_s;
    const double p_lifetime = level(Term::P3_2).lifetime_s;
    IonLevel current = IonLevel::S;
    for (std::size_t k = 0;; ++k) {
      double t = k * cfg_.cycle_period_s;
      if (t >= T) break;
      double end = std::min(t + cfg_.cycle_period_s, T);
      if (current != target) log(t, current, target, TransitionCause::protocol_pulse);
      current = target;
      out_.markers.push_back(t);
      double ts = t + rng_.exponential(decay_rate);
      double limit = std::min(ts, end);
      bool left = false;
      while (RelevantPair* pr = next_candidate(t, limit)) {
        t = pr->time_s;
        IonLevel to = decay_level(absorb(*pr));
        if (to == target) continue;
        log(t, target, to, TransitionCause::spdc_absorption, pr->heralded);
        current = to;
        left = true;
        if (to == IonLevel::S) {
          ++truth_.emitted_393;
          double te = t + emit_rng_.exponential(1.0 / p_lifetime);
          if (emit_rng_.bernoulli(cfg_.detection_efficiency_393)) {
            ++truth_.detected_393;
            out_.emitted_393.push_back(te);
          }
        }
        break;
      }
      if (!left && ts < end) {
        log(ts, target, IonLevel::S, TransitionCause::spontaneous);
        current = IonLevel::S;
      }
    }
  }

  const TrajectoryConfig& cfg_;
  const BranchingRatios& br_;
  std::vector<RelevantPair>& pairs_;
  GroundTruthLog& truth_;
  RngStream rng_;
  RngStream emit_rng_;
  std::size_t cursor_ = 0;
  IonRun out_;
};

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::A:
      return "A";
    case Scheme::B:
      return "B";
    case Scheme::C:
      return "C";
    case Scheme::D:
      return "D";
  }
  return "?";
}

std::string_view preparation_name(IonPreparation p) {
  switch (p) {
    case IonPreparation::unpolarized:
      return "unpolarized";
    case IonPreparation::pumped_lower:
      return "pumped_lower";
    case IonPreparation::pumped_upper:
      return "pumped_upper";
    case IonPreparation::custom:
      return "custom";
  }
  return "?";
}

std::string_view ion_level_name(IonLevel l) {
  switch (l) {
    case IonLevel::S:
      return "S1/2";
    case IonLevel::D3_2:
      return "D3/2";
    case IonLevel::D5_2:
      return "D5/2";
  }
  return "?";
}

std::string_view cause_name(TransitionCause c) {
  switch (c) {
    case TransitionCause::spontaneous:
      return "spontaneous";
    case TransitionCause::spdc_absorption:
      return "spdc_absorption";
    case TransitionCause::pump:
      return "pump";
    case TransitionCause::protocol_pulse:
      return "protocol_pulse";
  }
  return "?";
}

double JitterModel::sigma_s() const { return fwhm_s / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

double detector_jitter(const JitterModel& model, RngStream& rng) {
  if (!(model.fwhm_s >= 0.0)) throw usage_error("jitter fwhm must be >= 0");
  if (model.fwhm_s == 0.0) return 0.0;
  double x;
  do {
    x = rng.normal();
  } while (std::abs(x) > 5.0);
  return x * model.sigma_s();
}

void TrajectoryConfig::validate() const {
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw usage_error(std::string(what) + " must be >= 0");
  };
  nonneg(duration_s, "trajectory.duration");
  nonneg(r_on, "trajectory.r_on");
  nonneg(r_dark, "trajectory.r_dark");
  nonneg(pump_rate_850, "trajectory.pump_rate_850");
  nonneg(absorption_peak_rate, "trajectory.absorption_peak_rate");
  nonneg(jitter.fwhm_s, "trajectory.jitter_fwhm");
  if (!(tau0_s > 0.0)) throw usage_error("trajectory.tau0 must be > 0");
  if (!(atom_fwhm_mhz > 0.0)) throw usage_error("trajectory.atom_fwhm must be > 0");
  if (!(detection_efficiency_393 >= 0.0 && detection_efficiency_393 <= 1.0))
    throw usage_error("trajectory.detection_efficiency_393 must lie in [0, 1]");
  if (!(cycle_period_s > 0.0)) throw usage_error("trajectory.cycle_period must be > 0");
  if (tick_ps == 0) throw usage_error("trajectory.tick_ps must be > 0");
  if (pulsed) {
    if (scheme != Scheme::B) throw usage_error("pulsed detection requires scheme B");
    if (!(pulsed->cool_s > 0.0 && pulsed->pump_s > 0.0 && pulsed->detect_s > 0.0))
      throw usage_error("pulse sequence phases must have positive duration");
  }
  if (on_850_line(scheme) &&
      (preparation == IonPreparation::pumped_lower || preparation == IonPreparation::pumped_upper))
    throw usage_error("Zeeman-pumped preparations apply to the 854 nm schemes (B, D) only");
  source.validate();
  field.validate();
}

double AbsorptionProfile::spectral(double photon_detuning_mhz) const {
  double s = 0.0;
  for (const auto& c : components)
    s += c.weight * lorentzian(photon_detuning_mhz - c.center_mhz, fwhm_mhz);
  return s;
}

double AbsorptionProfile::polarization(const Eigen::Matrix2cd& rho) const {
  if (!accepted) return rho.trace().real();
  const Jones& a = accepted->jones();
  return std::clamp((a.adjoint() * rho * a)(0, 0).real(), 0.0, 1.0);
}

AbsorptionProfile absorption_profile(const TrajectoryConfig& cfg, const TransitionTable& table) {
  AbsorptionProfile p;
  p.fwhm_mhz = cfg.atom_fwhm_mhz;
  const bool lower = cfg.preparation == IonPreparation::pumped_lower;
  if (on_850_line(cfg.scheme) || !(lower || cfg.preparation == IonPreparation::pumped_upper)) {
    p.components.push_back({1.0, 0.0});
    if (cfg.preparation == IonPreparation::custom) p.accepted = cfg.accepted_polarization;
    return p;
  }
  // Equal mixture of the two outermost D5/2 sublevels; sigma+ (q = +1) from the
  // lower pair, sigma- from the upper pair.
  const int q = lower ? 1 : -1;
  const int sign = lower ? -1 : 1;
  double total = 0.0;
  for (int twice_m : {5 * sign, 3 * sign}) {
    Sublevel d{Term::D5_2, twice_m};
    Sublevel pu{Term::P3_2, twice_m + 2 * q};
    double w = 0.5 * table.coupling(d, pu, q);
    double center = zeeman_shift_mhz(pu, cfg.field) - zeeman_shift_mhz(d, cfg.field);
    p.components.push_back({w, center});
    total += w;
  }
  for (auto& c : p.components) c.weight /= total;
  p.accepted = lower ? PolarizationState::L() : PolarizationState::R();
  return p;
}

double peak_absorption_probability(const TrajectoryConfig& cfg, const TransitionTable& table) {
  if (cfg.source.pair_rate == 0.0 || cfg.absorption_peak_rate == 0.0) return 0.0;
  SourceConfig locked = cfg.source;
  locked.pump_offset_mhz = 0.0;
  double rate = cfg.absorption_peak_rate;
  if (on_850_line(cfg.scheme)) rate /= table.ratios().strength_ratio_854_850;
  double p = rate / (cfg.source.pair_rate * lorentz_weighted_mass(locked, 0.0, cfg.atom_fwhm_mhz));
  if (p > 1.0) throw usage_error("absorption_peak_rate exceeds one absorption per resonant photon");
  return p;
}

double spdc_absorption_rate(const TrajectoryConfig& cfg, const TransitionTable& table) {
  cfg.validate();
  const double p_max = peak_absorption_probability(cfg, table);
  if (p_max == 0.0) return 0.0;
  AbsorptionProfile prof = absorption_profile(cfg, table);
  double spectral = 0.0;
  for (const auto& c : prof.components)
    spectral += c.weight * lorentz_weighted_mass(cfg.source, c.center_mhz, prof.fwhm_mhz);
  double pol = prof.polarization(cfg.source.effective_pair_state().signal_marginal());
  return cfg.source.pair_rate * p_max * spectral * pol;
}

double expected_added_rate(const TrajectoryConfig& cfg, const TransitionTable& table) {
  const BranchingRatios& br = table.ratios();
  const double r = spdc_absorption_rate(cfg, table);
  switch (cfg.scheme) {
    case Scheme::A:
      return r * br.p32_to_d52;
    case Scheme::B:
      return r * (1.0 - br.p32_to_d52);
    case Scheme::C:
    case Scheme::D:
      return r * br.p32_to_s;
  }
  return r;
}

double relative_scheme_efficiency(const TransitionTable& table) {
  const BranchingRatios& br = table.ratios();
  return br.strength_ratio_854_850 * br.p32_to_s / br.p32_to_d52;
}

SimulationResult simulate(const TrajectoryConfig& cfg) { return simulate(cfg, TransitionTable{}); }

SimulationResult simulate(const TrajectoryConfig& cfg, const TransitionTable& table) {
  cfg.validate();
  SimulationResult res{TimeTagStream(cfg.tick_ps), {}, {}};
  if (cfg.duration_s == 0.0) return res;

  const Model model = make_model(cfg, table);
  const std::vector<Window> windows = live_windows(cfg);
  res.pairs = relevant_pairs(cfg, model, windows);
  IonRun run = IonSimulator(cfg, table, res.pairs, res.truth).run();

  const TimeTagStream& s = res.stream;
  const bool jump_scheme = cfg.scheme == Scheme::A || cfg.scheme == Scheme::B;
  std::vector<std::vector<std::uint64_t>> ch(channel::count);

  RngStream jit(cfg.master_seed, streams::jitter);
  const double offset = cfg.jitter.offset_s();
  for (const RelevantPair& p : res.pairs)
    if (p.heralded)
      ch[channel::herald].push_back(
          s.to_ticks(p.time_s + offset + detector_jitter(cfg.jitter, jit)));
  for (double t : run.emitted_393)
    ch[channel::emission_393].push_back(s.to_ticks(t + offset + detector_jitter(cfg.jitter, jit)));

  RngStream fl(cfg.master_seed, streams::fluorescence);
  auto& fl_ch = ch[channel::fluorescence];
  for (const Window& b : run.bright)
    for (double t = b.begin + fl.exponential(cfg.r_on); t < b.end; t += fl.exponential(cfg.r_on))
      fl_ch.push_back(s.to_ticks(t));
  RngStream dk(cfg.master_seed, streams::dark_counts);
  auto& dark_ch = jump_scheme ? fl_ch : ch[channel::emission_393];
  const std::size_t first_dark = dark_ch.size();
  for (const Window& w : windows)
    for (double t = w.begin + dk.exponential(cfg.r_dark); t < w.end;
         t += dk.exponential(cfg.r_dark))
      dark_ch.push_back(s.to_ticks(t));
  std::sort(dark_ch.begin(), dark_ch.begin() + first_dark);
  std::inplace_merge(dark_ch.begin(), dark_ch.begin() + first_dark, dark_ch.end());
  for (double t : run.markers) ch[channel::marker].push_back(s.to_ticks(t));

  std::sort(ch[channel::herald].begin(), ch[channel::herald].end());
  res.stream = TimeTagStream::merge(cfg.tick_ps, ch);
  return res;
}

}  // namespace ionabsorb
