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
#include <vector>

#include "ionabsorb/error.hpp"
#include "ionabsorb/transfer.hpp"

using namespace ionabsorb;

namespace {

TransferConfig ideal() {
  TransferConfig c;
  c.jitter.fwhm_s = 0.0;
  c.pulse_area_error = 0.0;
  return c;
}

}  // namespace

TEST_CASE("transfer targets map helicity to the S1/2 sublevels") {
  const IonQubitState up = transfer_target(PolarizationState::L());
  CHECK(std::norm(up.minus()) == doctest::Approx(1.0));
  CHECK(std::norm(up.plus()) == doctest::Approx(0.0));
  const IonQubitState down = transfer_target(PolarizationState::R());
  CHECK(std::norm(down.plus()) == doctest::Approx(1.0));
  const IonQubitState h = transfer_target(PolarizationState::H());
  CHECK(std::norm(h.minus()) == doctest::Approx(0.5));
  CHECK(h.fidelity(transfer_target(PolarizationState::V())) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("qubit free evolution and phase correction") {
  IonQubitState s(1.0, 1.0, 10.0);
  const IonQubitState e = s.evolved(25e-9);  // quarter period of 10 MHz
  CHECK(e.accumulated_phase_rad() == doctest::Approx(std::numbers::pi / 2));
  CHECK(e.fidelity(s) == doctest::Approx(0.5));
  CHECK(e.phase_corrected(25e-9).fidelity(s) == doctest::Approx(1.0));
  CHECK_THROWS_AS(IonQubitState(0.0, 0.0), Error);
}

TEST_CASE("state preparation") {
  const TransferRegister r = prepare_transfer_state(PulseSequence::transfer());
  CHECK(r.d_population() == doctest::Approx(1.0));
  CHECK(r.preparation_fidelity() == doctest::Approx(1.0));
  CHECK(r.relative_phase() == doctest::Approx(0.0));

  const TransferRegister e = prepare_transfer_state(PulseSequence::transfer(0.01));
  CHECK(e.preparation_fidelity() >= 0.999);
  CHECK(e.preparation_fidelity() < 1.0);

  PulseSequence full_rf = PulseSequence::transfer();
  full_rf.phases[2].pulse_area_rad = std::numbers::pi;
  const TransferRegister f = prepare_transfer_state(full_rf);
  CHECK(std::norm(f.amp(3)) == doctest::Approx(1.0));
  CHECK(std::norm(f.amp(2)) == doctest::Approx(0.0).epsilon(1e-15));

  PulseSequence bad = PulseSequence::transfer();
  bad.phases[4].twice_m_s = -1;
  bad.phases[4].twice_m_d = -3;
  CHECK_THROWS_AS(prepare_transfer_state(bad), Error);
  bad = PulseSequence::transfer();
  bad.phases.erase(bad.phases.begin() + 1);
  CHECK_THROWS_AS(prepare_transfer_state(bad), Error);
  bad = PulseSequence::transfer();
  bad.phases[0].duration_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(PulseSequence::transfer().period() ==
        doctest::Approx(5e-3 + 20e-6 + 10e-6 + 10e-6 + 10e-6));
}

TEST_CASE("a sigma+ photon lands in S-1/2") {
  const TransferRegister r = prepare_transfer_state(PulseSequence::transfer());
  TransferConfig c = ideal();
  const TransitionTable t;
  RngStream rng(3, 0);
  int heralded = 0;
  for (int i = 0; i < 200; ++i) {
    const TransferOutcome o = absorb_and_herald(r, PolarizationState::L(), c, t, rng);
    if (!o.heralded) continue;
    ++heralded;
    CHECK(*o.fidelity == doctest::Approx(1.0));
    CHECK(std::norm(o.output->minus()) == doctest::Approx(1.0));
    CHECK(o.herald_time_s >= 0.0);
  }
  CHECK(heralded > 150);  // heralding probability is the S branching ratio
  CHECK_THROWS_AS(
      absorb_and_herald(r, PolarizationState::from_jones(Jones(1.0, 0.0), {1, 0, 0}), c, t, rng),
      Error);
}

TEST_CASE("ideal transfer reaches unit fidelity for random inputs") {
  const FidelityReport rep = transfer_fidelity_experiment(ideal(), 1000);
  CHECK(rep.inputs == 1000);
  CHECK(rep.fidelities.size() == 1000);
  CHECK(rep.mean_fidelity == doctest::Approx(1.0).epsilon(1e-9));
  for (double f : rep.fidelities) REQUIRE(f == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.success_probability == doctest::Approx(0.9344).epsilon(0.05));
}

TEST_CASE("untracked Larmor phase averages the fidelity to 2/3") {
  TransferConfig c = ideal();
  c.phase_tracking = false;
  const FidelityReport rep = transfer_fidelity_experiment(c, 4000);
  CHECK(std::abs(rep.mean_fidelity - 2.0 / 3.0) < 0.01);
}

TEST_CASE("detector jitter dephases with the tracked phase") {
  CHECK(jitter_dephasing_factor(10.0, 0.0) == 1.0);
  const double sigma = JitterModel{1e-9}.sigma_s();
  const double d = jitter_dephasing_factor(10.0, sigma);
  CHECK(d == doctest::Approx(0.99964).epsilon(1e-5));
  TransferConfig c = ideal();
  c.jitter.fwhm_s = 20e-9;
  c.zeeman_splitting_mhz = 10.0;
  const double dd = jitter_dephasing_factor(10.0, c.jitter.sigma_s());
  const FidelityReport rep = transfer_fidelity_experiment(c, 4000);
  // Haar average of |<psi|U|psi>|^2 for a phase kick: 2/3 + d/3
  const double expect = 2.0 / 3.0 + dd / 3.0;
  CHECK(std::abs(rep.mean_fidelity - expect) < 5 * rep.error + 1e-3);
}

TEST_CASE("transfer runs are seeded and validated") {
  TransferConfig c = ideal();
  c.phase_tracking = false;
  const auto a = transfer_fidelity_experiment(c, 50);
  const auto b = transfer_fidelity_experiment(c, 50);
  CHECK(a.fidelities == b.fidelities);
  c.master_seed = 9;
  CHECK(transfer_fidelity_experiment(c, 50).fidelities != a.fidelities);
  CHECK_THROWS_AS(transfer_fidelity_experiment(c, 0), Error);
  c.detection_efficiency_393 = 0.0;
  CHECK_THROWS_AS(transfer_fidelity_experiment(c, 10), Error);
  c.detection_efficiency_393 = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("fidelity does not depend on the detection efficiency") {
  TransferConfig c = ideal();
  c.jitter.fwhm_s = 1e-9;
  c.pulse_area_error = 0.01;
  const std::vector<double> eff{0.1, 0.4, 0.7, 1.0};
  const EfficiencyScan s = transfer_efficiency_scan(c, eff, 300);
  REQUIRE(s.reports.size() == 4);
  REQUIRE(s.fit);
  CHECK(std::abs(s.fit->value("slope")) < 4 * s.fit->error("slope") + 1e-6);
  for (std::size_t i = 0; i < eff.size(); ++i)
    CHECK(s.reports[i].success_probability == doctest::Approx(0.9344 * eff[i]).epsilon(0.3));
  const std::vector<double> two{0.5, 1.0};
  CHECK_FALSE(transfer_efficiency_scan(c, two, 10).fit);
}
