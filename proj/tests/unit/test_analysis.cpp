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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ionabsorb/analysis.hpp"
#include "ionabsorb/error.hpp"
#include "ionabsorb/random.hpp"

using namespace ionabsorb;

namespace {

struct Telegraph {
  TimeTagStream stream{1000};
  std::vector<double> up;    // dark -> bright
  std::vector<double> down;  // bright -> dark
};

// Alternating bright / dark periods of fixed mean length with Poisson photons.
Telegraph telegraph(double duration, double r_on, double r_off, double mean_bright,
                    double mean_dark, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Telegraph tg;
  std::vector<std::uint64_t> ticks;
  bool bright = false;
  double t = 0.0;
  while (t < duration) {
    const double len = 0.05 + rng.exponential(1.0 / (bright ? mean_bright : mean_dark));
    const double end = std::min(duration, t + len);
    const double rate = bright ? r_on : r_off;
    for (double x = t + rng.exponential(rate); x < end; x += rng.exponential(rate))
      ticks.push_back(static_cast<std::uint64_t>(x * 1e9));
    if (end < duration) (bright ? tg.down : tg.up).push_back(end);
    t = end;
    bright = !bright;
  }
  std::sort(ticks.begin(), ticks.end());
  tg.stream = TimeTagStream::merge(1000, {{}, ticks});
  return tg;
}

std::vector<std::uint64_t> poisson_histogram(double m1, double m2, double w1, std::size_t n,
                                             std::uint64_t seed) {
  RngStream rng(seed, 1);
  std::vector<std::uint64_t> h(200, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = rng.uniform() < w1 ? m1 : m2;
    // Poisson count via exponential gaps in unit time
    std::uint64_t k = 0;
    for (double s = rng.exponential(m); s < 1.0; s += rng.exponential(m)) ++k;
    ++h[std::min<std::uint64_t>(k, 199)];
  }
  return h;
}

}  // namespace

TEST_CASE("Poisson tails") {
  CHECK(poisson_lower_tail(0, 3.0) == 0.0);
  CHECK(poisson_upper_tail(0, 3.0) == 1.0);
  CHECK(poisson_lower_tail(1, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(poisson_upper_tail(3, 2.0) == doctest::Approx(1 - 5 * std::exp(-2.0)));
  for (std::uint64_t n : {1, 5, 20, 60})
    CHECK(poisson_lower_tail(n, 20.0) + poisson_upper_tail(n, 20.0) ==
          doctest::Approx(1.0).epsilon(1e-13));
  CHECK(poisson_upper_tail(60, 0.5) > 0.0);  // deep tail stays positive
}

TEST_CASE("count threshold") {
  CHECK(optimal_count_threshold(20.0, 0.5) == 6);
  CHECK_THROWS_AS(optimal_count_threshold(3.0, 3.0), Error);
  // exhaustive scan agrees
  std::uint64_t best = 1;
  for (std::uint64_t n = 1; n <= 60; ++n)
    if (misclassification(n, 20.0, 0.5) < misclassification(best, 20.0, 0.5)) best = n;
  CHECK(best == 6);
  const double base = misclassification(6, 20.0, 0.5);
  const auto n100 = optimal_count_threshold(2000.0, 50.0);
  CHECK(misclassification(n100, 2000.0, 50.0) < base);
}

TEST_CASE("delay threshold") {
  CHECK(optimal_delay_threshold(1000.0, 10.0) ==
        doctest::Approx(4.615120516841259e-3).epsilon(1e-12));
  CHECK(optimal_delay_threshold(250.0, 250.0) == doctest::Approx(std::log(2.0) / 250.0));
  const double tau = optimal_delay_threshold(5e4, 100.0);
  const double p = detection_probability(tau, 5e4, 100.0);
  CHECK(p > detection_probability(0.9 * tau, 5e4, 100.0));
  CHECK(p > detection_probability(1.1 * tau, 5e4, 100.0));
  CHECK_THROWS_AS(optimal_delay_threshold(10.0, 0.0), Error);
}

TEST_CASE("binning") {
  TimeTagStream empty(1000);
  auto tr = bin_counts(empty, channel::fluorescence, 1e-3, 0.01);
  CHECK(tr.counts.size() == 10);
  CHECK(std::all_of(tr.counts.begin(), tr.counts.end(), [](auto c) { return c == 0; }));

  TimeTagStream one(1000);
  one.push_back({channel::fluorescence, 3'500'000});  // 3.5 ms
  one.push_back({channel::herald, 4'500'000});
  tr = bin_counts(one, channel::fluorescence, 1e-3, 0.01);
  CHECK(tr.counts[3] == 1);
  CHECK(std::accumulate(tr.counts.begin(), tr.counts.end(), 0u) == 1);
  const auto h = tr.histogram();
  CHECK(h[0] == 9);
  CHECK(h[1] == 1);

  // bin edges are half-open
  TimeTagStream edge(1000);
  edge.push_back({channel::fluorescence, 1'000'000});
  CHECK(bin_counts(edge, channel::fluorescence, 1e-3, 0.002).counts[1] == 1);

  const auto tg = telegraph(10.0, 5e4, 5e4, 1e9, 1e-9, 2);
  tr = bin_counts(tg.stream, channel::fluorescence, 1e-3, 0.05);
  double mean = 0.0;
  for (auto c : tr.counts) mean += c;
  CHECK(mean / tr.counts.size() == doctest::Approx(50.0).epsilon(0.3));
}

TEST_CASE("state means by EM") {
  const auto h = poisson_histogram(20.0, 0.5, 0.5, 100000, 4);
  const StateMeans m = estimate_state_means(h);
  CHECK(m.bright == doctest::Approx(20.0).epsilon(0.05));
  CHECK(m.dark == doctest::Approx(0.5).epsilon(0.05));
  CHECK(m.bright_weight == doctest::Approx(0.5).epsilon(0.05));
  const StateMeans swapped = estimate_state_means(h, 30.0, 0.1);
  CHECK(swapped.bright == doctest::Approx(m.bright).epsilon(1e-6));
  CHECK(swapped.dark == doctest::Approx(m.dark).epsilon(1e-6));
  RngStream rng(8, 8);
  for (int i = 0; i < 10; ++i) {
    const double a = 40 * rng.uniform(), b = 40 * rng.uniform();
    if (std::abs(a - b) < 1.0) continue;
    const StateMeans r = estimate_state_means(h, a, b);
    CHECK(r.bright == doctest::Approx(m.bright).epsilon(1e-5));
  }
  const auto single = poisson_histogram(7.0, 7.0, 0.5, 20000, 5);
  CHECK_THROWS_AS(estimate_state_means(single), Error);
}

TEST_CASE("jump detection") {
  const auto bright = telegraph(5.0, 5e4, 5e4, 1e9, 1e-9, 3);
  CHECK(detect_jumps(bright.stream, channel::fluorescence, 6.0, 1e-3, 10,
                     JumpDirection::dark_to_bright, 5.0)
            .empty());

  const auto tg = telegraph(60.0, 5e4, 100.0, 0.3, 0.3, 5);
  const auto up = detect_jumps(tg.stream, channel::fluorescence, 25.0, 1e-3, 10,
                               JumpDirection::dark_to_bright, 60.0);
  const auto down = detect_jumps(tg.stream, channel::fluorescence, 25.0, 1e-3, 10,
                                 JumpDirection::bright_to_dark, 60.0);
  CHECK(std::abs(double(up.size()) - double(tg.up.size())) <= 1);
  CHECK(std::abs(double(down.size()) - double(tg.down.size())) <= 1);
  for (std::size_t i = 0; i + 1 < std::min(up.size(), tg.up.size()); ++i) {
    CHECK(up[i].direction == JumpDirection::dark_to_bright);
    CHECK(up[i].window_begin_s <= tg.up[i] + 1e-3);
    CHECK(up[i].window_end_s >= tg.up[i] - 1e-3);
    CHECK(up[i].window_end_s - up[i].window_begin_s == doctest::Approx(11e-3));
  }
}

TEST_CASE("transition photon extraction") {
  const std::vector<double> dense{0.0, 1e-5, 2e-5, 3e-5};
  CHECK_THROWS_AS(extract_transition_photon(dense, 1e-3, JumpDirection::dark_to_bright), Error);
  const std::vector<double> up{0.0, 0.005, 0.010, 0.010010, 0.010020, 0.010030};
  CHECK(extract_transition_photon(up, 1e-3, JumpDirection::dark_to_bright) == 2);
  const std::vector<double> down{0.0, 1e-5, 2e-5, 3e-5, 0.006, 0.012};
  CHECK(extract_transition_photon(down, 1e-3, JumpDirection::bright_to_dark) == 3);
  // a window bound counts as a gap edge
  const std::vector<double> first{0.004, 0.004010, 0.004020};
  CHECK(extract_transition_photon(first, 1e-3, JumpDirection::dark_to_bright, 0.0) == 0);
  CHECK_THROWS_AS(extract_transition_photon(first, 1e-3, JumpDirection::dark_to_bright), Error);
}

TEST_CASE("dark periods and derived rate") {
  const std::vector<double> to_dark{1.0, 3.0, 7.0}, to_bright{0.5, 2.0, 3.5, 9.0};
  const auto d = dark_period_durations(to_dark, to_bright);
  CHECK(d == std::vector<double>{1.0, 0.5, 2.0});

  CHECK(derived_absorption_rate(0.675, 1.11) == doctest::Approx(0.5805805805805806).epsilon(1e-12));
  CHECK(derived_absorption_rate(0.8, 0.8) == 0.0);
  CHECK(derived_absorption_rate(0.25, 1.0) - derived_absorption_rate(0.5, 1.0) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(derived_absorption_rate(1.2, 1.11), Error);
  CHECK_THROWS_AS(derived_absorption_rate(0.0, 1.11), Error);
}

TEST_CASE("full jump pipeline on a telegraph record") {
  const auto tg = telegraph(200.0, 5e4, 100.0, 0.5, 1.0, 6);
  const JumpAnalysis ja = analyze_jumps(tg.stream, 200.0);
  CHECK(ja.means.bright == doctest::Approx(50.0).epsilon(0.02));
  CHECK(ja.means.dark == doctest::Approx(0.1).epsilon(0.2));
  CHECK(ja.count_threshold >= 2);
  CHECK(ja.count_threshold <= 30);
  CHECK(std::abs(double(ja.to_bright.size()) - double(tg.up.size())) <= 1);
  CHECK(ja.ambiguous <= 1);
  // the first photon after a switch trails it by Exp(r_on)
  std::size_t within2 = 0, within4 = 0;
  const auto first = ja.first_photon_ticks();
  for (double t : tg.up) {
    auto it = std::lower_bound(first.begin(), first.end(), static_cast<std::uint64_t>(t * 1e9));
    if (it == first.end()) continue;
    const double delay = *it * 1e-9 - t;
    within2 += delay < 2.0 / 5e4;
    within4 += delay < 4.0 / 5e4;
  }
  const double n = static_cast<double>(tg.up.size());
  const double p2 = 1.0 - std::exp(-2.0);
  CHECK(std::abs(within2 / n - p2) < 4.0 * std::sqrt(p2 * (1.0 - p2) / n));
  CHECK(within4 >= 0.95 * n);
  REQUIRE(ja.dark_fit);
  // mean dark length 1 s plus the 0.05 s floor, about 125 periods
  CHECK(ja.dark_fit->value("tau") == doctest::Approx(1.05).epsilon(0.3));
}
