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
#include <numbers>
#include <vector>

#include "ionabsorb/correlation.hpp"
#include "ionabsorb/error.hpp"
#include "ionabsorb/fitting.hpp"
#include "ionabsorb/random.hpp"

using namespace ionabsorb;

namespace {

std::vector<std::uint64_t> poisson_ticks(double rate_per_tick, std::uint64_t span, RngStream& rng) {
  std::vector<std::uint64_t> out;
  for (double t = rng.exponential(rate_per_tick); t < span; t += rng.exponential(rate_per_tick))
    out.push_back(static_cast<std::uint64_t>(t));
  return out;
}

// O(n^2) reference: lag b - a falls in bin k when k w - w/2 <= lag < k w + w/2.
std::vector<std::uint64_t> brute_g2(const std::vector<std::uint64_t>& a,
                                    const std::vector<std::uint64_t>& b, std::int64_t w,
                                    std::int64_t K) {
  std::vector<std::uint64_t> h(2 * K + 1, 0);
  for (auto x : a)
    for (auto y : b) {
      const double lag = double(y) - double(x);
      const auto k = static_cast<std::int64_t>(std::floor((2.0 * lag + w) / (2.0 * w)));
      if (k >= -K && k <= K) ++h[k + K];
    }
  return h;
}

}  // namespace

TEST_CASE("g2 of a shifted copy") {
  RngStream rng(1, 1);
  // tags 20 us apart with up to 1 us of scatter: no unrelated pair within +-3.5 us
  std::vector<std::uint64_t> a, b;
  for (std::uint64_t k = 0; k < 1000; ++k) a.push_back(20000 * k + rng.next_u64() % 1000);
  for (auto t : a) b.push_back(t + 3000);  // +3 us
  const auto h = g2(a, b, 1000, 3, 1e-9);
  CHECK(h.at(3) == a.size());
  CHECK(h.central_sum(2) == 0);
  CHECK(h.lag_s(3) == doctest::Approx(3e-6));
}

TEST_CASE("g2 matches brute-force pair counting") {
  RngStream rng(2, 2);
  for (int inst = 0; inst < 50; ++inst) {
    const std::uint64_t span = 1'000'000 + rng.next_u64() % 1'000'000;
    auto a = poisson_ticks(2e-3 * rng.uniform() + 1e-4, span, rng);
    auto b = poisson_ticks(2e-3 * rng.uniform() + 1e-4, span, rng);
    const std::int64_t w = 1 + rng.next_u64() % 200;
    const std::int64_t K = 2 + rng.next_u64() % 50;
    const auto h = g2(a, b, w, K);
    CHECK(h.counts == brute_g2(a, b, w, K));
  }
}

TEST_CASE("uncorrelated streams give the accidental level") {
  RngStream rng(3, 3);
  const double r1 = 1e-4, r2 = 2e-4;  // per tick
  const std::uint64_t T = 100'000'000;
  const auto a = poisson_ticks(r1, T, rng), b = poisson_ticks(r2, T, rng);
  const std::int64_t w = 500;
  const auto h = g2(a, b, w, 40);
  const double expect = r1 * r2 * T * w;
  CHECK(std::abs(h.background - expect) < 3 * std::sqrt(expect / 78.0));
  CHECK(std::abs(double(h.at(0)) - expect) < 4 * std::sqrt(expect));
}

TEST_CASE("peak significance") {
  CorrelationHistogram h;
  h.peak_counts = 83;
  h.background = 13.6;
  CHECK(peak_significance(h) == doctest::Approx(18.8187).epsilon(1e-5));
  h.peak_counts = 5;
  h.background = 5;
  CHECK(peak_significance(h) == 0.0);
  h.background = 0.0;
  CHECK_THROWS_AS(peak_significance(h), Error);
  CHECK_THROWS_AS(g2(std::vector<std::uint64_t>{}, std::vector<std::uint64_t>{}, 10, 1), Error);
  CHECK_THROWS_AS(g2(std::vector<std::uint64_t>{}, std::vector<std::uint64_t>{}, 0, 5), Error);
}

TEST_CASE("peak bin ties prefer small lags") {
  const std::vector<std::uint64_t> a{1000};
  const std::vector<std::uint64_t> b{1000, 1200};
  const auto h = g2(a, b, 100, 4);
  CHECK(h.at(0) == 1);
  CHECK(h.at(2) == 1);
  CHECK(h.peak_bin == 0);
}

TEST_CASE("exponential MLE") {
  std::vector<double> s;
  // exact quantiles of Exp(mean 1.11)
  const int n = 1000;
  for (int i = 0; i < n; ++i) s.push_back(-1.11 * std::log1p(-(i + 0.5) / n));
  const FitResult f = fit_exponential(s);
  double mean = 0.0;
  for (double x : s) mean += x;
  mean /= n;
  CHECK(f.value("tau") == doctest::Approx(mean).epsilon(1e-12));
  CHECK(f.value("tau") == doctest::Approx(1.11).epsilon(0.01));
  CHECK(f.error("tau") == doctest::Approx(mean / std::sqrt(n)).epsilon(1e-12));
  CHECK(f.residual_norm < 0.01);  // KS distance
  CHECK_THROWS_AS(fit_exponential(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(fit_exponential(std::vector<double>{1.0, -2.0}), Error);
}

TEST_CASE("Lorentzian fit on exact data") {
  std::vector<DataPoint> d;
  for (double x = -80; x <= 80; x += 8)
    d.push_back({x, 1.5 + 40.0 / (1 + std::pow(2 * (x - 4.5) / 44.0, 2)), 1.0});
  const FitResult f = fit_lorentzian(d);
  CHECK(f.value("amplitude") == doctest::Approx(40.0).epsilon(1e-6));
  CHECK(f.value("center") == doctest::Approx(4.5).epsilon(1e-6));
  CHECK(f.value("fwhm") == doctest::Approx(44.0).epsilon(1e-6));
  CHECK(f.value("offset") == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(f.residual_norm < 1e-6);
  // independent of input order
  std::vector<DataPoint> r(d.rbegin(), d.rend());
  CHECK(fit_lorentzian(r).value("fwhm") == f.value("fwhm"));
}

TEST_CASE("sinusoid fit") {
  std::vector<DataPoint> d;
  for (double x = 0; x <= 90; x += 11.25)
    d.push_back({x, 100 + 80 * std::sin(2 * std::numbers::pi * x / 90 + 0.3), 2.0});
  const FitResult f = fit_sinusoid_fixed_period(d, 90.0);
  CHECK(f.value("amplitude") == doctest::Approx(80.0).epsilon(1e-10));
  CHECK(f.value("offset") == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(f.value("visibility") == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(f.error("visibility") > 0.0);
  // three points at the same phase cannot fix a sinusoid
  const std::vector<DataPoint> bad{{0, 1, 1}, {90, 1, 1}, {180, 1, 1}, {270, 2, 1}};
  CHECK_THROWS_AS(fit_sinusoid_fixed_period(bad, 90.0), Error);
}

TEST_CASE("line fit") {
  std::vector<DataPoint> d{{0, 1, 1}, {1, 3, 1}, {2, 5, 1}, {3, 7, 1}};
  FitResult f = fit_line(d);
  CHECK(f.value("slope") == doctest::Approx(2.0));
  CHECK(f.value("intercept") == doctest::Approx(1.0));
  CHECK(f.value("r_squared") == doctest::Approx(1.0));
  d[1].y = 2.0;
  f = fit_line(d);
  CHECK(f.value("r_squared") < 1.0);
  CHECK(f.error("slope") > 0.0);
}
