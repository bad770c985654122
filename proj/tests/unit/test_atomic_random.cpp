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
#include <numbers>

#include "ionabsorb/atomic_model.hpp"
#include "ionabsorb/error.hpp"
#include "ionabsorb/random.hpp"

using namespace ionabsorb;

TEST_CASE("stream seeds follow SplitMix64") {
  // First SplitMix64 output for state 0 is the published 0xe220a8397b1dcdaf.
  CHECK(derive_stream_seed(0, 0) == 16294208416658607535ULL);
  CHECK(derive_stream_seed(42, 7) == 14680896716286437513ULL);
  CHECK(derive_stream_seed(1, stream_key(streams::protocol, 3)) == 16664547827068528104ULL);
  CHECK(derive_stream_seed(1, 2) != derive_stream_seed(2, 1));
}

TEST_CASE("random streams are reproducible and independent") {
  RngStream a(5, stream_key(streams::ion, 0)), b(5, stream_key(streams::ion, 0));
  RngStream c(5, stream_key(streams::ion, 1));
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    same += x == c.next_u64();
  }
  CHECK(same == 0);
}

TEST_CASE("variate moments") {
  RngStream r(9, 1);
  const int n = 200000;
  double su = 0, se = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    se += r.exponential(4.0);
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(se / n == doctest::Approx(0.25).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::isinf(r.exponential(0.0)));
}

TEST_CASE("cauchy median and quartiles") {
  RngStream r(3, 3);
  const int n = 100000;
  int below = 0, inner = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.cauchy(10.0, 2.0);
    below += x < 10.0;
    inner += std::abs(x - 10.0) < 2.0;
  }
  CHECK(below / double(n) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(inner / double(n) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("Zeeman shifts") {
  MagneticField one{1.0, {0, 0, 1}};
  CHECK(zeeman_shift_mhz({Term::S1_2, 1}, one) == doctest::Approx(1.399624).epsilon(1e-12));
  CHECK(zeeman_shift_mhz({Term::S1_2, -1}, one) == doctest::Approx(-1.399624).epsilon(1e-12));
  MagneticField zero{0.0, {0, 0, 1}};
  for (int m = -5; m <= 5; m += 2) CHECK(zeeman_shift_mhz({Term::D5_2, m}, zero) == 0.0);
  // gJ(D5/2) = 6/5
  MagneticField three{3.0, {0, 0, 1}};
  CHECK(zeeman_shift_mhz({Term::D5_2, 5}, three) == doctest::Approx(12.596616).epsilon(1e-12));
  MagneticField bad{1.0, {1, 1, 0}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("Clebsch-Gordan values") {
  CHECK(clebsch_gordan(1, 1, 1, -1, 2, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(clebsch_gordan(1, 1, 1, -1, 0, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(clebsch_gordan(1, 1, 1, 1, 2, 2) == doctest::Approx(1.0));
  CHECK(clebsch_gordan(1, 1, 1, 1, 0, 0) == 0.0);
  // <5/2 -3/2; 1 1 | 3/2 -1/2>^2 = 2/5
  CHECK(std::pow(clebsch_gordan(5, -3, 2, 2, 3, -1), 2) == doctest::Approx(0.4));
}

TEST_CASE("transition table couplings") {
  const TransitionTable t;
  CHECK(t.coupling({Term::D5_2, 5}, {Term::P3_2, 5}, 0) == 0.0);
  const double a = t.coupling({Term::D5_2, -3}, {Term::P3_2, -1}, 1);
  const double b = t.coupling({Term::D5_2, 3}, {Term::P3_2, 1}, -1);
  CHECK(a > 0.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  // wrong helicity
  CHECK(t.coupling({Term::D5_2, -3}, {Term::P3_2, -1}, -1) == 0.0);

  for (Term lower : {Term::S1_2, Term::D3_2, Term::D5_2}) {
    const int tj = level(lower).twice_j;
    for (int mu = -3; mu <= 3; mu += 2) {
      double sum = 0.0;
      for (int ml = -tj; ml <= tj; ml += 2)
        for (int q = -1; q <= 1; ++q) sum += t.coupling({lower, ml}, {Term::P3_2, mu}, q);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("branching ratios and line data") {
  const TransitionTable t;
  CHECK(t.branching(Term::P3_2, Term::S1_2) == doctest::Approx(0.9344));
  CHECK(t.branching(Term::P3_2, Term::D5_2) == doctest::Approx(0.0590));
  CHECK(t.branching(Term::P3_2, Term::D3_2) == doctest::Approx(0.0066));
  double sum = 0.0;
  for (Term lo : {Term::S1_2, Term::D3_2, Term::D5_2}) sum += t.branching(Term::P3_2, lo);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.line(Term::P3_2, Term::D5_2).wavelength_nm == doctest::Approx(854.2).epsilon(1e-3));
  CHECK(level(Term::D5_2).lifetime_s == doctest::Approx(1.11));
  CHECK(!t.report().empty());
}

TEST_CASE("Lorentzian line shapes") {
  CHECK(lorentzian(0.0, 22.0) == 1.0);
  CHECK(lorentzian(11.0, 22.0) == doctest::Approx(0.5));
  CHECK(lorentzian(110.0, 22.0) == doctest::Approx(1.0 / 101.0).epsilon(1e-14));
  CHECK(absorption_lineshape(0.0, 22.0, 22.0) == 1.0);
  CHECK(absorption_lineshape(22.0, 22.0, 22.0) == doctest::Approx(0.5));
}
