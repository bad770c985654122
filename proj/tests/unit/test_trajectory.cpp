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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ionabsorb/error.hpp"
#include "ionabsorb/trajectory.hpp"

using namespace ionabsorb;

namespace {

// Durations of the D5/2 periods entered from the bright state.
std::vector<double> truth_dark_periods(const GroundTruthLog& log) {
  std::vector<double> out;
  double start = -1.0;
  for (const auto& t : log.transitions) {
    if (t.to == IonLevel::D5_2 && t.from == IonLevel::S) start = t.time_s;
    if (t.from == IonLevel::D5_2 && t.to != IonLevel::D5_2 && start >= 0.0) {
      out.push_back(t.time_s - start);
      start = -1.0;
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

TrajectoryConfig light_b() {
  TrajectoryConfig c;
  c.scheme = Scheme::B;
  c.r_on = 2e3;
  c.r_dark = 10.0;
  c.pump_rate_850 = 5.0;
  c.duration_s = 1000.0;
  return c;
}

}  // namespace

TEST_CASE("detector jitter") {
  RngStream rng(4, 4);
  JitterModel none{0.0};
  CHECK(detector_jitter(none, rng) == 0.0);
  JitterModel j{1e-9};
  CHECK(j.sigma_s() == doctest::Approx(0.42466e-9).epsilon(1e-4));
  double s = 0, s2 = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double x = detector_jitter(j, rng);
    REQUIRE(std::abs(x) <= 5 * j.sigma_s());
    REQUIRE(x + j.offset_s() >= 0.0);
    s += x;
    s2 += x * x;
  }
  CHECK(std::sqrt(s2 / n - s * s / n / n) == doctest::Approx(0.4247e-9).epsilon(3e-3));
}

TEST_CASE("scheme efficiency ratio") {
  const TransitionTable t;
  CHECK(relative_scheme_efficiency(t) == doctest::Approx(6 * 0.9344 / 0.0590).epsilon(1e-12));
  CHECK(relative_scheme_efficiency(t) == doctest::Approx(95.0237).epsilon(1e-6));
  BranchingRatios eq;
  eq.p32_to_s = eq.p32_to_d52 = 0.4;
  eq.p32_to_d32 = 0.2;
  CHECK(relative_scheme_efficiency(TransitionTable(eq)) == doctest::Approx(6.0));
  eq.strength_ratio_854_850 = 1.0;
  CHECK(relative_scheme_efficiency(TransitionTable(eq)) == doctest::Approx(1.0));
}

TEST_CASE("absorption profiles") {
  const TransitionTable t;
  TrajectoryConfig c;
  AbsorptionProfile p = absorption_profile(c, t);
  REQUIRE(p.components.size() == 1);
  CHECK(p.components[0].center_mhz == 0.0);
  CHECK_FALSE(p.accepted);
  CHECK(p.spectral(0.0) == doctest::Approx(1.0));

  c.preparation = IonPreparation::pumped_lower;
  p = absorption_profile(c, t);
  REQUIRE(p.accepted);
  CHECK(p.polarization(PolarizationState::L().projector()) == doctest::Approx(1.0));
  CHECK(p.polarization(PolarizationState::R().projector()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.polarization(PolarizationState::H().projector()) == doctest::Approx(0.5));
  double wsum = 0.0, lower_center = 0.0;
  for (const auto& k : p.components) {
    wsum += k.weight;
    lower_center += k.weight * k.center_mhz;
  }
  CHECK(wsum == doctest::Approx(1.0));

  c.preparation = IonPreparation::pumped_upper;
  p = absorption_profile(c, t);
  CHECK(p.polarization(PolarizationState::R().projector()) == doctest::Approx(1.0));
  double upper_center = 0.0;
  for (const auto& k : p.components) upper_center += k.weight * k.center_mhz;
  CHECK(upper_center == doctest::Approx(-lower_center).epsilon(1e-12));
  CHECK(std::abs(lower_center) > 1.0);

  c.field.magnitude_gauss = 0.0;
  p = absorption_profile(c, t);
  for (const auto& k : p.components) CHECK(k.center_mhz == 0.0);
}

TEST_CASE("configuration validation") {
  TrajectoryConfig c;
  c.duration_s = 0.0;
  const auto empty = simulate(c);
  CHECK(empty.stream.empty());
  CHECK(empty.truth.transitions.empty());
  c = {};
  c.scheme = Scheme::A;
  c.pulsed = PulsedDetection{};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.r_on = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.scheme = Scheme::C;
  c.preparation = IonPreparation::pumped_lower;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.source.pair_rate = 1.0;
  c.absorption_peak_rate = 1e9;  // needs a per-photon probability above one
  CHECK_THROWS_AS(peak_absorption_probability(c, TransitionTable()), Error);
}

TEST_CASE("simulation is deterministic per seed") {
  TrajectoryConfig c = light_b();
  c.duration_s = 20.0;
  c.source.pair_rate = 1e5;
  c.absorption_peak_rate = 1.0;
  const auto a = simulate(c), b = simulate(c);
  CHECK(a.stream == b.stream);
  CHECK(a.truth.transitions.size() == b.truth.transitions.size());
  c.master_seed = 2;
  CHECK_FALSE(simulate(c).stream == a.stream);
}

TEST_CASE("stream invariants") {
  TrajectoryConfig c = light_b();
  c.duration_s = 50.0;
  c.source.pair_rate = 1e6;
  c.absorption_peak_rate = 2.0;
  const auto r = simulate(c);
  const auto ts = r.stream.timestamps();
  const auto ch = r.stream.channels();
  for (std::size_t i = 1; i < ts.size(); ++i) {
    REQUIRE(ts[i - 1] <= ts[i]);
    if (ts[i - 1] == ts[i]) REQUIRE(ch[i - 1] <= ch[i]);
  }
  for (auto x : ch) REQUIRE(x < channel::count);
  for (const auto& p : r.pairs) CHECK((p.heralded || p.absorption_candidate));
  std::size_t heralds = 0, absorbed = 0;
  for (const auto& p : r.pairs) {
    heralds += p.heralded;
    absorbed += p.absorbed;
  }
  CHECK(heralds == r.stream.channel_count(channel::herald));
  CHECK(absorbed == r.truth.absorptions);
}

TEST_CASE("dark periods without the source follow the D5/2 lifetime") {
  TrajectoryConfig c = light_b();
  c.source.pair_rate = 0.0;
  const auto r = simulate(c);
  const auto d = truth_dark_periods(r.truth);
  REQUIRE(d.size() > 500);
  const double se = 1.11 / std::sqrt(double(d.size()));
  CHECK(std::abs(mean(d) - 1.11) < 3 * se);
  CHECK(r.truth.absorptions == 0);
  CHECK(r.stream.channel_count(channel::herald) == 0);
}

TEST_CASE("SPDC absorption adds to the dark-state decay rate") {
  const TransitionTable t;
  TrajectoryConfig c = light_b();
  c.source.pair_rate = 1e6;
  c.absorption_peak_rate = 1.0;
  const double unit = expected_added_rate(c, t);
  REQUIRE(unit > 0.0);
  c.absorption_peak_rate = 0.581 / unit;
  CHECK(expected_added_rate(c, t) == doctest::Approx(0.581));
  CHECK(spdc_absorption_rate(c, t) * (1 - 0.059) == doctest::Approx(0.581));
  const auto r = simulate(c, t);
  const auto d = truth_dark_periods(r.truth);
  const double tau = 1.0 / (1.0 / 1.11 + 0.581);
  CHECK(tau == doctest::Approx(0.675).epsilon(1e-3));
  CHECK(std::abs(mean(d) - tau) < 3 * tau / std::sqrt(double(d.size())));
  CHECK(r.truth.heralded_absorptions > 0);
  CHECK(r.truth.heralded_absorptions < r.truth.absorptions);
}

TEST_CASE("scheme A: absorption pumps the bright ion dark") {
  const TransitionTable t;
  TrajectoryConfig c = light_b();
  c.scheme = Scheme::A;
  c.source.pair_rate = 1e6;
  c.absorption_peak_rate = 1.0;
  c.duration_s = 300.0;
  const double added = expected_added_rate(c, t);
  CHECK(added == doctest::Approx(spdc_absorption_rate(c, t) * 0.059));
  c.absorption_peak_rate = 2.0 / added;
  const auto r = simulate(c, t);
  std::size_t to_dark = 0;
  for (const auto& x : r.truth.transitions)
    if (x.from == IonLevel::S && x.to == IonLevel::D5_2) {
      ++to_dark;
      CHECK(x.cause == TransitionCause::spdc_absorption);
    }
  // bright periods last 1/2 s, dark ones 1.11 s
  const double expect = 300.0 / (0.5 + 1.11);
  CHECK(std::abs(to_dark - expect) < 4 * std::sqrt(expect));
}

TEST_CASE("schemes C and D emit heralding 393 nm photons") {
  const TransitionTable t;
  for (Scheme s : {Scheme::C, Scheme::D}) {
    CAPTURE(scheme_name(s));
    TrajectoryConfig c;
    c.scheme = s;
    c.duration_s = 50.0;
    c.r_dark = 5.0;
    c.source.pair_rate = 1e6;
    c.absorption_peak_rate = 5.0;
    c.detection_efficiency_393 = 0.5;
    const auto r = simulate(c, t);
    CHECK(r.truth.emitted_393 > 20);
    CHECK(r.truth.detected_393 <= r.truth.emitted_393);
    const double p = double(r.truth.detected_393) / r.truth.emitted_393;
    CHECK(std::abs(p - 0.5) < 4 * std::sqrt(0.25 / r.truth.emitted_393));
    CHECK(r.stream.channel_count(channel::emission_393) >= r.truth.detected_393);
    CHECK(r.stream.channel_count(channel::marker) == std::size_t(std::ceil(50.0 / 1e-3)));
    CHECK(r.stream.channel_count(channel::fluorescence) == 0);
  }
}

TEST_CASE("pulsed detection writes one marker per cycle") {
  TrajectoryConfig c;
  c.pulsed = PulsedDetection{};
  c.pump_rate_850 = 0.0;
  c.preparation = IonPreparation::pumped_lower;
  c.duration_s = 2.0;
  const auto r = simulate(c);
  const auto markers = r.stream.channel_ticks(channel::marker);
  CHECK(markers.size() == std::size_t(2.0 / c.pulsed->period()));
  // detection is live only inside the detect windows
  for (auto tk : r.stream.channel_ticks(channel::fluorescence)) {
    const double t = tk * 1e-9;
    const double phase = std::fmod(t, c.pulsed->period());
    REQUIRE(phase >= c.pulsed->cool_s + c.pulsed->pump_s - 1e-9);
  }
}
