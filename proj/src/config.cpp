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

#include "ionabsorb/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

struct Ctx {
  int line;
  std::string_view key;
  std::string_view raw;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(line, "key '" + std::string(key) + "': " + what);
  }
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const Ctx& c, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    c.fail("expected a number, got '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_uint(const Ctx& c, std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    c.fail("expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

bool parse_bool(const Ctx& c) {
  if (c.raw == "true") return true;
  if (c.raw == "false") return false;
  c.fail("expected true or false, got '" + std::string(c.raw) + "'");
}

std::vector<double> parse_list(const Ctx& c) {
  std::vector<double> out;
  if (c.raw.empty()) return out;
  std::string_view rest = c.raw;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(c, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <class E, std::size_t N>
E parse_enum(const Ctx& c, const std::array<E, N>& values, std::string_view (*name)(E)) {
  std::string choices;
  for (E v : values) {
    if (name(v) == c.raw) return v;
    choices += (choices.empty() ? "" : ", ") + std::string(name(v));
  }
  c.fail("expected one of {" + choices + "}, got '" + std::string(c.raw) + "'");
}

double nonneg(const Ctx& c) {
  const double v = parse_double(c, c.raw);
  if (!(v >= 0.0) || !std::isfinite(v)) c.fail("must be finite and >= 0");
  return v;
}

double positive(const Ctx& c) {
  const double v = parse_double(c, c.raw);
  if (!(v > 0.0) || !std::isfinite(v)) c.fail("must be finite and > 0");
  return v;
}

double unit(const Ctx& c) {
  const double v = parse_double(c, c.raw);
  if (!(v >= 0.0 && v <= 1.0)) c.fail("must lie in [0, 1]");
  return v;
}

double finite(const Ctx& c) {
  const double v = parse_double(c, c.raw);
  if (!std::isfinite(v)) c.fail("must be finite");
  return v;
}

std::uint8_t channel_id(const Ctx& c) {
  const auto v = parse_uint(c, c.raw);
  if (v >= channel::count) c.fail("channel ids are 0..3");
  return static_cast<std::uint8_t>(v);
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), p);
}

std::string fmt(bool b) { return b ? "true" : "false"; }
std::string fmt_uint(std::uint64_t v) { return std::to_string(v); }

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out;
}

std::string_view bell_name(BellState b) {
  switch (b) {
    case BellState::psi_plus:
      return "psi_plus";
    case BellState::psi_minus:
      return "psi_minus";
    case BellState::phi_plus:
      return "phi_plus";
    case BellState::phi_minus:
      return "phi_minus";
  }
  return "?";
}

std::string_view splitter_name(Splitter s) { return s == Splitter::pbs ? "pbs" : "npbs"; }

constexpr std::array kAllKinds{ExperimentKind::quantum_jump, ExperimentKind::polarization,
                               ExperimentKind::spectroscopy, ExperimentKind::entanglement,
                               ExperimentKind::transfer};
constexpr std::array kAllSchemes{Scheme::A, Scheme::B, Scheme::C, Scheme::D};
constexpr std::array kAllPreparations{IonPreparation::unpolarized, IonPreparation::pumped_lower,
                                      IonPreparation::pumped_upper, IonPreparation::custom};
constexpr std::array kAllBells{BellState::psi_plus, BellState::psi_minus, BellState::phi_plus,
                               BellState::phi_minus};
constexpr std::array kAllSplitters{Splitter::pbs, Splitter::npbs};
constexpr std::array kAllBases{Basis::RL, Basis::HV, Basis::DA};

std::optional<PolarizationState> named_polarization(std::string_view n) {
  if (n == "H") return PolarizationState::H();
  if (n == "V") return PolarizationState::V();
  if (n == "D") return PolarizationState::D();
  if (n == "A") return PolarizationState::A();
  if (n == "L") return PolarizationState::L();
  if (n == "R") return PolarizationState::R();
  return std::nullopt;
}

std::string polarization_name(const Ctx& c) {
  if (!named_polarization(c.raw)) c.fail("expected one of {H, V, D, A, L, R}");
  return std::string(c.raw);
}

struct Key {
  std::string_view section;
  std::string_view name;
  std::function<void(ExperimentConfig&, const Ctx&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define NUM_KEY(sec, key, field, check)                                      \
  Key {                                                                      \
    sec, key, [](ExperimentConfig& e, const Ctx& c) { e.field = check(c); }, \
        [](const ExperimentConfig& e) { return fmt(e.field); }               \
  }
#define BOOL_KEY(sec, key, field)                                                 \
  Key {                                                                           \
    sec, key, [](ExperimentConfig& e, const Ctx& c) { e.field = parse_bool(c); }, \
        [](const ExperimentConfig& e) { return fmt(e.field); }                    \
  }

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
      {"", "kind",
       [](ExperimentConfig& e, const Ctx& c) {
         e.kind = parse_enum(c, kAllKinds, experiment_kind_name);
       },
       [](const ExperimentConfig& e) { return std::string(experiment_kind_name(e.kind)); }},
      {"", "seed", [](ExperimentConfig& e, const Ctx& c) { e.seed = parse_uint(c, c.raw); },
       [](const ExperimentConfig& e) { return fmt_uint(e.seed); }},

      {"trajectory", "scheme",
       [](ExperimentConfig& e, const Ctx& c) {
         e.trajectory.scheme = parse_enum(c, kAllSchemes, scheme_name);
       },
       [](const ExperimentConfig& e) { return std::string(scheme_name(e.trajectory.scheme)); }},
      NUM_KEY("trajectory", "duration", trajectory.duration_s, nonneg),
      NUM_KEY("trajectory", "r_on", trajectory.r_on, nonneg),
      NUM_KEY("trajectory", "r_dark", trajectory.r_dark, nonneg),
      NUM_KEY("trajectory", "pump_rate_850", trajectory.pump_rate_850, nonneg),
      NUM_KEY("trajectory", "tau0", trajectory.tau0_s, positive),
      NUM_KEY("trajectory", "absorption_peak_rate", trajectory.absorption_peak_rate, nonneg),
      NUM_KEY("trajectory", "atom_fwhm", trajectory.atom_fwhm_mhz, positive),
      NUM_KEY("trajectory", "detection_efficiency_393", trajectory.detection_efficiency_393, unit),
      NUM_KEY("trajectory", "field_gauss", trajectory.field.magnitude_gauss, nonneg),
      {"trajectory", "field_axis",
       [](ExperimentConfig& e, const Ctx& c) {
         const auto v = parse_list(c);
         if (v.size() != 3) c.fail("expected three components");
         const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
         if (!(n > 0.0) || !std::isfinite(n)) c.fail("axis must be a non-zero finite vector");
         e.trajectory.field.axis = {v[0] / n, v[1] / n, v[2] / n};
       },
       [](const ExperimentConfig& e) {
         const auto& a = e.trajectory.field.axis;
         return fmt_list({a[0], a[1], a[2]});
       }},
      {"trajectory", "preparation",
       [](ExperimentConfig& e, const Ctx& c) {
         e.trajectory.preparation = parse_enum(c, kAllPreparations, preparation_name);
       },
       [](const ExperimentConfig& e) {
         return std::string(preparation_name(e.trajectory.preparation));
       }},
      {"trajectory", "accepted_polarization",
       [](ExperimentConfig& e, const Ctx& c) { e.accepted_polarization = polarization_name(c); },
       [](const ExperimentConfig& e) { return e.accepted_polarization; }},
      BOOL_KEY("trajectory", "pulsed", pulsed),
      NUM_KEY("trajectory", "cool", pulsed_timing.cool_s, nonneg),
      NUM_KEY("trajectory", "pump", pulsed_timing.pump_s, nonneg),
      NUM_KEY("trajectory", "detect", pulsed_timing.detect_s, positive),
      NUM_KEY("trajectory", "cycle_period", trajectory.cycle_period_s, positive),
      NUM_KEY("trajectory", "jitter_fwhm", trajectory.jitter.fwhm_s, nonneg),
      {"trajectory", "tick_ps",
       [](ExperimentConfig& e, const Ctx& c) {
         const auto v = parse_uint(c, c.raw);
         if (v == 0 || v > 0xFFFFFFFFull) c.fail("must lie in [1, 2^32)");
         e.trajectory.tick_ps = static_cast<std::uint32_t>(v);
       },
       [](const ExperimentConfig& e) { return fmt_uint(e.trajectory.tick_ps); }},

      NUM_KEY("source", "pair_rate", trajectory.source.pair_rate, nonneg),
      NUM_KEY("source", "raw_bandwidth", trajectory.source.raw_bandwidth_ghz, positive),
      NUM_KEY("source", "filter_fwhm", trajectory.source.filter_fwhm_mhz, positive),
      NUM_KEY("source", "filter_detuning", trajectory.source.filter_detuning_mhz, finite),
      NUM_KEY("source", "pump_offset", trajectory.source.pump_offset_mhz, finite),
      NUM_KEY("source", "herald_efficiency", trajectory.source.herald_efficiency, unit),
      {"source", "splitter",
       [](ExperimentConfig& e, const Ctx& c) {
         e.trajectory.source.splitter = parse_enum(c, kAllSplitters, splitter_name);
       },
       [](const ExperimentConfig& e) {
         return std::string(splitter_name(e.trajectory.source.splitter));
       }},
      {"source", "pair_state",
       [](ExperimentConfig& e, const Ctx& c) { e.pair_bell = parse_enum(c, kAllBells, bell_name); },
       [](const ExperimentConfig& e) { return std::string(bell_name(e.pair_bell)); }},
      NUM_KEY("source", "werner_p", werner_p, unit),
      {"source", "signal_polarization",
       [](ExperimentConfig& e, const Ctx& c) { e.signal_polarization = polarization_name(c); },
       [](const ExperimentConfig& e) { return e.signal_polarization; }},
      BOOL_KEY("source", "analyzer", trajectory.source.herald_analyzer.enabled),
      BOOL_KEY("source", "analyzer_qwp", trajectory.source.herald_analyzer.has_qwp),
      NUM_KEY("source", "qwp_angle", trajectory.source.herald_analyzer.qwp_deg, finite),
      NUM_KEY("source", "hwp_angle", trajectory.source.herald_analyzer.hwp_deg, finite),

      NUM_KEY("analysis", "bin", analysis.jumps.bin_s, positive),
      {"analysis", "window_bins",
       [](ExperimentConfig& e, const Ctx& c) {
         const auto v = parse_uint(c, c.raw);
         if (v == 0) c.fail("must be >= 1");
         e.analysis.jumps.window_bins = static_cast<std::size_t>(v);
       },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.jumps.window_bins); }},
      {"analysis", "channel",
       [](ExperimentConfig& e, const Ctx& c) { e.analysis.jumps.channel = channel_id(c); },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.jumps.channel); }},
      {"analysis", "count_threshold",
       [](ExperimentConfig& e, const Ctx& c) {
         if (c.raw == "auto")
           e.analysis.jumps.count_threshold.reset();
         else
           e.analysis.jumps.count_threshold = parse_uint(c, c.raw);
       },
       [](const ExperimentConfig& e) {
         const auto& t = e.analysis.jumps.count_threshold;
         return t ? fmt_uint(*t) : std::string("auto");
       }},
      NUM_KEY("analysis", "g2_bin", analysis.g2_bin_s, positive),
      {"analysis", "g2_half_bins",
       [](ExperimentConfig& e, const Ctx& c) {
         const auto v = parse_uint(c, c.raw);
         if (v < 2 || v > 1000000) c.fail("must lie in [2, 1e6]");
         e.analysis.g2_half_bins = static_cast<std::int64_t>(v);
       },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.g2_half_bins); }},
      {"analysis", "g2_channel_a",
       [](ExperimentConfig& e, const Ctx& c) { e.analysis.g2_channel_a = channel_id(c); },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.g2_channel_a); }},
      {"analysis", "g2_channel_b",
       [](ExperimentConfig& e, const Ctx& c) { e.analysis.g2_channel_b = channel_id(c); },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.g2_channel_b); }},
      {"analysis", "g2_signal",
       [](ExperimentConfig& e, const Ctx& c) {
         if (c.raw == "jumps")
           e.analysis.g2_use_jump_photons = true;
         else if (c.raw == "raw")
           e.analysis.g2_use_jump_photons = false;
         else
           c.fail("expected one of {jumps, raw}");
       },
       [](const ExperimentConfig& e) {
         return std::string(e.analysis.g2_use_jump_photons ? "jumps" : "raw");
       }},
      NUM_KEY("analysis", "coincidence_bin", analysis.coincidence.bin_s, positive),
      {"analysis", "coincidence_half_bins",
       [](ExperimentConfig& e, const Ctx& c) {
         const auto v = parse_uint(c, c.raw);
         if (v < 2 || v > 1000000) c.fail("must lie in [2, 1e6]");
         e.analysis.coincidence.half_bins = static_cast<std::int64_t>(v);
       },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.coincidence.half_bins); }},
      {"analysis", "coincidence_window_bins",
       [](ExperimentConfig& e, const Ctx& c) {
         e.analysis.coincidence.window_bins = static_cast<std::int64_t>(parse_uint(c, c.raw));
       },
       [](const ExperimentConfig& e) { return fmt_uint(e.analysis.coincidence.window_bins); }},
      BOOL_KEY("analysis", "reference_run", analysis.reference_run),
      NUM_KEY("analysis", "reference_duration", analysis.reference_duration_s, nonneg),

      {"protocol", "qwp_angles",
       [](ExperimentConfig& e, const Ctx& c) { e.protocol.qwp_deg = parse_list(c); },
       [](const ExperimentConfig& e) { return fmt_list(e.protocol.qwp_deg); }},
      {"protocol", "filter_detunings",
       [](ExperimentConfig& e, const Ctx& c) { e.protocol.filter_detunings_mhz = parse_list(c); },
       [](const ExperimentConfig& e) { return fmt_list(e.protocol.filter_detunings_mhz); }},
      {"protocol", "hwp_angles",
       [](ExperimentConfig& e, const Ctx& c) { e.protocol.hwp_deg = parse_list(c); },
       [](const ExperimentConfig& e) { return fmt_list(e.protocol.hwp_deg); }},
      {"protocol", "bases",
       [](ExperimentConfig& e, const Ctx& c) {
         e.protocol.bases.clear();
         std::string_view rest = c.raw;
         while (!rest.empty()) {
           const auto comma = rest.find(',');
           const Ctx item{c.line, c.key, trim(rest.substr(0, comma))};
           e.protocol.bases.push_back(parse_enum(item, kAllBases, basis_name));
           if (comma == std::string_view::npos) break;
           rest.remove_prefix(comma + 1);
         }
       },
       [](const ExperimentConfig& e) {
         std::string out;
         for (Basis b : e.protocol.bases)
           out += (out.empty() ? "" : ", ") + std::string(basis_name(b));
         return out;
       }},
      BOOL_KEY("protocol", "calibrate", protocol.calibrate),
      NUM_KEY("protocol", "target_added_rate", protocol.target_added_rate, positive),
      NUM_KEY("protocol", "target_peak", protocol.target_peak, positive),
      NUM_KEY("protocol", "target_background", protocol.target_background, positive),

      NUM_KEY("transfer", "pulse_area_error", transfer.model.pulse_area_error, finite),
      NUM_KEY("transfer", "zeeman_splitting", transfer.model.zeeman_splitting_mhz, finite),
      NUM_KEY("transfer", "jitter_fwhm", transfer.model.jitter.fwhm_s, nonneg),
      BOOL_KEY("transfer", "phase_tracking", transfer.model.phase_tracking),
      NUM_KEY("transfer", "absorption_probability", transfer.model.absorption_probability, unit),
      NUM_KEY("transfer", "detection_efficiency_393", transfer.model.detection_efficiency_393,
              unit),
      NUM_KEY("transfer", "exposure", transfer.model.exposure_s, positive),
      {"transfer", "inputs",
       [](ExperimentConfig& e, const Ctx& c) {
         const auto v = parse_uint(c, c.raw);
         if (v == 0) c.fail("must be >= 1");
         e.transfer.inputs = static_cast<std::size_t>(v);
       },
       [](const ExperimentConfig& e) { return fmt_uint(e.transfer.inputs); }},
      {"transfer", "efficiencies",
       [](ExperimentConfig& e, const Ctx& c) {
         auto v = parse_list(c);
         if (v.empty()) c.fail("needs at least one value");
         for (double x : v)
           if (!(x > 0.0 && x <= 1.0)) c.fail("efficiencies must lie in (0, 1]");
         e.transfer.efficiencies = std::move(v);
       },
       [](const ExperimentConfig& e) { return fmt_list(e.transfer.efficiencies); }},

      {"output", "directory",
       [](ExperimentConfig& e, const Ctx& c) {
         if (c.raw.empty()) c.fail("must not be empty");
         e.output.directory = std::string(c.raw);
       },
       [](const ExperimentConfig& e) { return e.output.directory; }},
      {"output", "prefix",
       [](ExperimentConfig& e, const Ctx& c) {
         if (c.raw.find_first_of("/\\") != std::string_view::npos)
           c.fail("must not contain path separators");
         e.output.prefix = std::string(c.raw);
       },
       [](const ExperimentConfig& e) { return e.output.prefix; }},
      BOOL_KEY("output", "stream", output.stream),
      BOOL_KEY("output", "truth", output.truth),
      BOOL_KEY("output", "pairs", output.pairs),
  };
  return keys;
}

#undef NUM_KEY
#undef BOOL_KEY

bool known_section(std::string_view s) {
  for (const auto& k : schema())
    if (k.section == s) return true;
  return false;
}

void assign(ExperimentConfig& cfg, std::string_view section, std::string_view key,
            std::string_view value, int line) {
  for (const auto& k : schema()) {
    if (k.section == section && k.name == key) {
      k.set(cfg, Ctx{line, key, value});
      return;
    }
  }
  const std::string full =
      section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
  throw ConfigError(line, "unknown key '" + full + "'");
}

void finish(ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(0, std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace

std::string_view experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::quantum_jump:
      return "quantum_jump";
    case ExperimentKind::polarization:
      return "polarization";
    case ExperimentKind::spectroscopy:
      return "spectroscopy";
    case ExperimentKind::entanglement:
      return "entanglement";
    case ExperimentKind::transfer:
      return "transfer";
  }
  return "?";
}

TrajectoryConfig ExperimentConfig::resolved_trajectory() const {
  TrajectoryConfig t = trajectory;
  t.source.pair_state = PairPolarizationState::werner(werner_p, pair_bell);
  t.source.signal_polarization = *named_polarization(signal_polarization);
  t.accepted_polarization = *named_polarization(accepted_polarization);
  t.pulsed = pulsed ? std::optional<PulsedDetection>(pulsed_timing) : std::nullopt;
  t.master_seed = seed;
  return t;
}

TransferConfig ExperimentConfig::resolved_transfer() const {
  TransferConfig t = transfer.model;
  t.master_seed = seed;
  return t;
}

void ExperimentConfig::validate() const {
  if (!named_polarization(signal_polarization) || !named_polarization(accepted_polarization))
    throw usage_error("polarizations must be one of H, V, D, A, L, R");
  resolved_trajectory().validate();
  resolved_transfer().validate();
  if (analysis.coincidence.window_bins >= analysis.coincidence.half_bins)
    throw usage_error("analysis.coincidence_window_bins must be below coincidence_half_bins");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) throw ConfigError(line_no, "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    assign(cfg, section, key, trim(line.substr(eq + 1)), line_no);
  }
  finish(cfg);
  return cfg;
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(0, "override '" + std::string(assignment) + "' is not key=value");
  const auto path = trim(assignment.substr(0, eq));
  const auto dot = path.find('.');
  const auto section = dot == std::string_view::npos ? std::string_view{} : path.substr(0, dot);
  const auto key = dot == std::string_view::npos ? path : path.substr(dot + 1);
  assign(cfg, section, key, trim(assignment.substr(eq + 1)), 0);
  finish(cfg);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  std::string_view section;
  for (const auto& k : schema()) {
    if (k.section != section) {
      section = k.section;
      out << "\n[" << section << "]\n";
    }
    out << k.name << " = " << k.get(cfg) << "\n";
  }
  return out.str();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::filesystem::path resolved = path;
  if (path.is_relative() && !std::filesystem::exists(path)) {
    if (const char* dir = std::getenv(kConfigDirEnv); dir && *dir)
      resolved = std::filesystem::path(dir) / path;
  }
  std::ifstream f(resolved, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ionabsorb
