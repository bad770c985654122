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

#include "ionabsorb/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <json.hpp>

#include "ionabsorb/analysis.hpp"
#include "ionabsorb/correlation.hpp"
#include "ionabsorb/error.hpp"
#include "ionabsorb/protocols.hpp"
#include "ionabsorb/transfer.hpp"

namespace ionabsorb {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array kCommands{Command::simulate,   Command::jumps,    Command::g2,
                               Command::polar_scan, Command::spectrum, Command::entangle_scan,
                               Command::transfer,   Command::report};

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(std::int64_t v) { return std::to_string(v); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json fit_json(const FitResult& f) {
  Json j;
  for (const auto& p : f.parameters)
    j[p.name] = {{"value", number_or_null(p.value)}, {"error", number_or_null(p.error)}};
  j["residual_norm"] = number_or_null(f.residual_norm);
  j["iterations"] = f.iterations;
  return j;
}

Json optional_fit(const std::optional<FitResult>& f) { return f ? fit_json(*f) : Json(nullptr); }

Json header(Command cmd, const ExperimentConfig& cfg) {
  Json j;
  j["command"] = command_name(cmd);
  j["seed"] = cfg.seed;
  return j;
}

double stream_duration(const ExperimentConfig& cfg, const TimeTagStream* input) {
  if (!input) return cfg.trajectory.duration_s;
  if (input->empty()) return 0.0;
  return static_cast<double>(input->timestamps().back() + 1) * input->tick_seconds();
}

// The analysed record: the input, or a fresh simulation kept alive in `own`.
const TimeTagStream& record(const ExperimentConfig& cfg, const TimeTagStream* input,
                            std::optional<TimeTagStream>& own) {
  if (input) return *input;
  own = simulate(cfg.resolved_trajectory()).stream;
  return *own;
}

Json channel_counts(const TimeTagStream& s) {
  std::array<std::uint64_t, channel::count> n{};
  for (auto c : s.channels())
    if (c < channel::count) ++n[c];
  return {{"herald", n[channel::herald]},
          {"fluorescence", n[channel::fluorescence]},
          {"emission_393", n[channel::emission_393]},
          {"marker", n[channel::marker]}};
}

Table truth_table(const GroundTruthLog& log) {
  Table t{"truth", {"time_s", "from", "to", "cause", "heralded"}, {}};
  for (const auto& tr : log.transitions)
    t.rows.push_back({num(tr.time_s), std::string(ion_level_name(tr.from)),
                      std::string(ion_level_name(tr.to)), std::string(cause_name(tr.cause)),
                      tr.heralded ? "1" : "0"});
  return t;
}

Table pairs_table(const std::vector<RelevantPair>& pairs) {
  Table t{"pairs", {"time_s", "signal_detuning_mhz", "heralded", "candidate", "absorbed"}, {}};
  for (const auto& p : pairs)
    t.rows.push_back({num(p.time_s), num(p.signal_detuning_mhz), p.heralded ? "1" : "0",
                      p.absorption_candidate ? "1" : "0", p.absorbed ? "1" : "0"});
  return t;
}

Table g2_table(const std::string& name, const CorrelationHistogram& h) {
  Table t{name, {"bin", "lag_s", "counts"}, {}};
  for (std::int64_t k = -h.half_bins; k <= h.half_bins; ++k)
    t.rows.push_back({num(k), num(h.lag_s(k)), num(h.at(k))});
  return t;
}

Json g2_json(const CorrelationHistogram& h) {
  Json j;
  j["bin_s"] = h.bin_width_s();
  j["half_bins"] = h.half_bins;
  j["background"] = h.background;
  j["peak_bin"] = h.peak_bin;
  j["peak_lag_s"] = h.lag_s(h.peak_bin);
  j["peak_counts"] = h.peak_counts;
  j["zero_lag_counts"] = h.at(0);
  j["significance"] = h.background > 0.0 ? number_or_null(peak_significance(h)) : Json(nullptr);
  return j;
}

Table durations_table(const std::string& name, const std::vector<double>& d) {
  Table t{name, {"index", "duration_s"}, {}};
  for (std::size_t i = 0; i < d.size(); ++i) t.rows.push_back({num(std::uint64_t{i}), num(d[i])});
  return t;
}

Json jumps_json(const JumpAnalysis& ja) {
  Json j;
  j["bright_mean"] = ja.means.bright;
  j["dark_mean"] = ja.means.dark;
  j["count_threshold"] = ja.count_threshold;
  j["r_on"] = ja.r_on;
  j["r_off"] = ja.r_off;
  j["tau_th"] = ja.tau_th;
  j["jumps_to_bright"] = ja.to_bright.size();
  j["jumps_to_dark"] = ja.to_dark.size();
  j["ambiguous_windows"] = ja.ambiguous;
  j["dark_periods"] = ja.dark_durations.size();
  j["dark_fit"] = optional_fit(ja.dark_fit);
  return j;
}

std::vector<std::uint64_t> jump_photons(const ExperimentConfig& cfg, const TimeTagStream& s,
                                        double duration) {
  const TrajectoryConfig t = cfg.resolved_trajectory();
  if (t.pulsed) {
    const double tau = optimal_delay_threshold(t.r_on, std::max(t.r_dark, 1e-3));
    return gated_first_photons(s, t.pulsed->detect_s, tau, cfg.analysis.jumps.channel);
  }
  const JumpAnalysis ja = analyze_jumps(s, duration, cfg.analysis.jumps);
  if (t.scheme != Scheme::A) return ja.first_photon_ticks();
  std::vector<std::uint64_t> out;
  for (const auto& e : ja.to_dark)
    if (e.transition_tick) out.push_back(*e.transition_tick);
  return out;
}

Table scan_table(const std::string& name, const ScanResult& r) {
  Table t{name,
          {"label", "x", "expected", "counts", "background", "net", "error", "heralds", "signals"},
          {}};
  for (const auto& p : r.points)
    t.rows.push_back({p.label, num(p.x), num(p.expected), num(p.coincidences.counts),
                      num(p.coincidences.background), num(p.coincidences.net),
                      num(p.coincidences.error), num(std::uint64_t{p.heralds}),
                      num(std::uint64_t{p.signals})});
  return t;
}

RunOutput do_simulate(const ExperimentConfig& cfg) {
  const TransitionTable table;
  const TrajectoryConfig t = cfg.resolved_trajectory();
  SimulationResult sim = simulate(t, table);
  RunOutput out;
  Json j = header(Command::simulate, cfg);
  j["scheme"] = scheme_name(t.scheme);
  j["duration_s"] = t.duration_s;
  j["tick_ps"] = t.tick_ps;
  j["tags"] = sim.stream.size();
  j["channels"] = channel_counts(sim.stream);
  j["transitions"] = sim.truth.transitions.size();
  j["absorptions"] = sim.truth.absorptions;
  j["heralded_absorptions"] = sim.truth.heralded_absorptions;
  j["emitted_393"] = sim.truth.emitted_393;
  j["detected_393"] = sim.truth.detected_393;
  j["relevant_pairs"] = sim.pairs.size();
  j["expected_added_rate"] = expected_added_rate(t, table);
  out.summary_json = j.dump(2);
  if (cfg.output.truth) out.tables.push_back(truth_table(sim.truth));
  if (cfg.output.pairs) out.tables.push_back(pairs_table(sim.pairs));
  if (cfg.output.stream) out.stream = std::move(sim.stream);
  return out;
}

RunOutput do_jumps(const ExperimentConfig& cfg, const TimeTagStream* input) {
  std::optional<TimeTagStream> own;
  const TimeTagStream& s = record(cfg, input, own);
  const double duration = stream_duration(cfg, input);
  const JumpAnalysis ja = analyze_jumps(s, duration, cfg.analysis.jumps);
  RunOutput out;
  Json j = header(Command::jumps, cfg);
  j["duration_s"] = duration;
  j["analysis"] = jumps_json(ja);
  out.summary_json = j.dump(2);

  const FluorescenceTrace trace =
      bin_counts(s, cfg.analysis.jumps.channel, cfg.analysis.jumps.bin_s, duration);
  const auto hist = trace.histogram();
  Table h{"histogram", {"counts", "bins"}, {}};
  for (std::size_t k = 0; k < hist.size(); ++k)
    h.rows.push_back({num(std::uint64_t{k}), num(hist[k])});
  out.tables.push_back(std::move(h));

  Table ev{"jumps", {"direction", "bin", "window_begin_s", "window_end_s", "transition_s"}, {}};
  auto add = [&](const std::vector<JumpEvent>& v) {
    for (const auto& e : v)
      ev.rows.push_back(
          {e.direction == JumpDirection::dark_to_bright ? "dark_to_bright" : "bright_to_dark",
           num(std::uint64_t{e.bin}), num(e.window_begin_s), num(e.window_end_s),
           e.transition_tick ? num(*e.transition_tick * s.tick_seconds()) : ""});
  };
  add(ja.to_bright);
  add(ja.to_dark);
  std::stable_sort(ev.rows.begin(), ev.rows.end(), [](const auto& a, const auto& b) {
    return std::stoull(a[1]) < std::stoull(b[1]);
  });
  out.tables.push_back(std::move(ev));
  out.tables.push_back(durations_table("dark_periods", ja.dark_durations));
  return out;
}

RunOutput do_g2(const ExperimentConfig& cfg, const TimeTagStream* input) {
  std::optional<TimeTagStream> own;
  const TimeTagStream& s = record(cfg, input, own);
  const auto& a = cfg.analysis;
  const std::vector<std::uint64_t> first = s.channel_ticks(a.g2_channel_a);
  const std::vector<std::uint64_t> second = a.g2_use_jump_photons
                                                ? jump_photons(cfg, s, stream_duration(cfg, input))
                                                : s.channel_ticks(a.g2_channel_b);
  const std::uint64_t bin = std::max<std::uint64_t>(1, s.to_ticks(a.g2_bin_s));
  const CorrelationHistogram h = g2(first, second, bin, a.g2_half_bins, s.tick_seconds());
  RunOutput out;
  Json j = header(Command::g2, cfg);
  j["channel_a"] = a.g2_channel_a;
  j["signal"] = a.g2_use_jump_photons ? "jumps" : "raw";
  if (!a.g2_use_jump_photons) j["channel_b"] = a.g2_channel_b;
  j["tags_a"] = first.size();
  j["tags_b"] = second.size();
  j["histogram"] = g2_json(h);
  out.summary_json = j.dump(2);
  out.tables.push_back(g2_table("g2", h));
  return out;
}

RunOutput do_polar_scan(const ExperimentConfig& cfg) {
  const auto settings = qwp_settings(cfg.protocol.qwp_deg);
  const ScanResult r =
      run_polarization_scan(cfg.resolved_trajectory(), settings, cfg.analysis.coincidence);
  RunOutput out;
  Json j = header(Command::polar_scan, cfg);
  j["points"] = r.points.size();
  j["fit"] = optional_fit(r.fit);
  out.summary_json = j.dump(2);
  out.tables.push_back(scan_table("polarization_scan", r));
  return out;
}

RunOutput do_spectrum(const ExperimentConfig& cfg) {
  const SpectroscopyResult r = run_spectroscopy_scan(
      cfg.resolved_trajectory(), cfg.protocol.filter_detunings_mhz, cfg.analysis.coincidence);
  RunOutput out;
  Json j = header(Command::spectrum, cfg);
  j["sigma_plus"] = optional_fit(r.lower.fit);
  j["sigma_minus"] = optional_fit(r.upper.fit);
  out.summary_json = j.dump(2);
  out.tables.push_back(scan_table("spectrum_sigma_plus", r.lower));
  out.tables.push_back(scan_table("spectrum_sigma_minus", r.upper));
  return out;
}

RunOutput do_entangle(const ExperimentConfig& cfg) {
  RunOutput out;
  Json j = header(Command::entangle_scan, cfg);
  Json bases;
  const TrajectoryConfig t = cfg.resolved_trajectory();
  for (Basis b : cfg.protocol.bases) {
    const ScanResult r =
        run_entanglement_scan(t, b, cfg.protocol.hwp_deg, cfg.analysis.coincidence);
    bases[std::string(basis_name(b))] = optional_fit(r.fit);
    out.tables.push_back(scan_table("entangle_" + std::string(basis_name(b)), r));
  }
  j["werner_p"] = cfg.werner_p;
  j["bases"] = bases;
  out.summary_json = j.dump(2);
  return out;
}

RunOutput do_transfer(const ExperimentConfig& cfg) {
  const TransferConfig base = cfg.resolved_transfer();
  const EfficiencyScan scan =
      transfer_efficiency_scan(base, cfg.transfer.efficiencies, cfg.transfer.inputs);
  RunOutput out;
  Json j = header(Command::transfer, cfg);
  Table t{
      "transfer", {"efficiency", "mean_fidelity", "error", "success_probability", "attempts"}, {}};
  Json rows = Json::array();
  for (std::size_t i = 0; i < scan.reports.size(); ++i) {
    const FidelityReport& r = scan.reports[i];
    const double eta = scan.efficiencies[i];
    t.rows.push_back({num(eta), num(r.mean_fidelity), num(r.error), num(r.success_probability),
                      num(std::uint64_t{r.attempts})});
    rows.push_back({{"efficiency", eta}, {"mean_fidelity", r.mean_fidelity}, {"error", r.error}});
  }
  j["inputs"] = cfg.transfer.inputs;
  j["jitter_dephasing_factor"] =
      jitter_dephasing_factor(base.zeeman_splitting_mhz, base.jitter.sigma_s());
  j["runs"] = rows;
  j["efficiency_fit"] = optional_fit(scan.fit);
  out.summary_json = j.dump(2);
  out.tables.push_back(std::move(t));
  return out;
}

RunOutput do_quantum_jump_report(const ExperimentConfig& cfg) {
  TrajectoryConfig t = cfg.resolved_trajectory();
  Json j = header(Command::report, cfg);
  j["kind"] = experiment_kind_name(cfg.kind);
  if (cfg.protocol.calibrate) {
    const auto cal =
        calibrate_coincidence_run(t, cfg.protocol.target_added_rate, cfg.protocol.target_peak,
                                  cfg.protocol.target_background, cfg.analysis.g2_bin_s);
    t.source.pair_rate = cal.pair_rate;
    t.source.herald_efficiency = cal.herald_efficiency;
    t.absorption_peak_rate = cal.absorption_peak_rate;
    j["calibration"] = {{"pair_rate", cal.pair_rate},
                        {"herald_efficiency", cal.herald_efficiency},
                        {"absorption_peak_rate", cal.absorption_peak_rate},
                        {"expected_peak", cal.expected_peak},
                        {"expected_background", cal.expected_background}};
  }
  QuantumJumpSettings qs;
  qs.analysis = cfg.analysis.jumps;
  qs.g2_bin_s = cfg.analysis.g2_bin_s;
  qs.g2_half_bins = cfg.analysis.g2_half_bins;
  qs.reference_run = cfg.analysis.reference_run;
  qs.reference_duration_s = cfg.analysis.reference_duration_s;
  const QuantumJumpReport r = run_quantum_jump_experiment(t, qs);

  auto tau = [](const std::optional<FitResult>& f) {
    return f ? Json{{"value", f->value("tau")}, {"error", number_or_null(f->error("tau"))}}
             : Json(nullptr);
  };
  j["scheme"] = scheme_name(t.scheme);
  j["duration_s"] = t.duration_s;
  j["tau_on"] = tau(r.on.dark_fit);
  j["tau_off"] = r.off ? tau(r.off->dark_fit) : Json(nullptr);
  j["R"] = r.rate ? Json{{"value", r.rate->value}, {"error", number_or_null(r.rate->error)}}
                  : Json(nullptr);
  j["configured_added_rate"] = r.configured_added_rate;
  j["significance"] = r.significance ? number_or_null(*r.significance) : Json(nullptr);
  j["g2"] = g2_json(r.g2);
  j["on"] = jumps_json(r.on);
  j["off"] = r.off ? jumps_json(*r.off) : Json(nullptr);
  j["truth"] = {{"absorptions", r.truth.absorptions},
                {"heralded_absorptions", r.truth.heralded_absorptions}};
  RunOutput out;
  out.summary_json = j.dump(2);
  out.tables.push_back(g2_table("g2", r.g2));
  out.tables.push_back(durations_table("dark_periods_on", r.on.dark_durations));
  if (r.off) out.tables.push_back(durations_table("dark_periods_off", r.off->dark_durations));
  return out;
}

RunOutput do_report(const ExperimentConfig& cfg) {
  RunOutput out;
  switch (cfg.kind) {
    case ExperimentKind::quantum_jump:
      return do_quantum_jump_report(cfg);
    case ExperimentKind::polarization:
      out = do_polar_scan(cfg);
      break;
    case ExperimentKind::spectroscopy:
      out = do_spectrum(cfg);
      break;
    case ExperimentKind::entanglement:
      out = do_entangle(cfg);
      break;
    case ExperimentKind::transfer:
      out = do_transfer(cfg);
      break;
  }
  Json j = Json::parse(out.summary_json);
  j["command"] = command_name(Command::report);
  j["kind"] = experiment_kind_name(cfg.kind);
  out.summary_json = j.dump(2);
  return out;
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::simulate:
      return "simulate";
    case Command::jumps:
      return "jumps";
    case Command::g2:
      return "g2";
    case Command::polar_scan:
      return "polar-scan";
    case Command::spectrum:
      return "spectrum";
    case Command::entangle_scan:
      return "entangle-scan";
    case Command::transfer:
      return "transfer";
    case Command::report:
      return "report";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : kCommands)
    if (command_name(c) == name) return c;
  return std::nullopt;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), p);
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  return out;
}

RunOutput run_command(Command cmd, const ExperimentConfig& cfg, const TimeTagStream* input) {
  cfg.validate();
  switch (cmd) {
    case Command::simulate:
      return do_simulate(cfg);
    case Command::jumps:
      return do_jumps(cfg, input);
    case Command::g2:
      return do_g2(cfg, input);
    case Command::polar_scan:
      return do_polar_scan(cfg);
    case Command::spectrum:
      return do_spectrum(cfg);
    case Command::entangle_scan:
      return do_entangle(cfg);
    case Command::transfer:
      return do_transfer(cfg);
    case Command::report:
      return do_report(cfg);
  }
  throw usage_error("unknown command");
}

}  // namespace ionabsorb
