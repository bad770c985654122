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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ionabsorb/config.hpp"
#include "ionabsorb/error.hpp"
#include "ionabsorb/random.hpp"
#include "ionabsorb/stream_io.hpp"
#include "ionabsorb/timetag.hpp"

using namespace ionabsorb;

namespace {

TimeTagStream random_stream(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<TimeTag> tags;
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += rng.next_u64() % 1000;
    tags.push_back({static_cast<std::uint8_t>(rng.next_u64() % 4), t});
  }
  // equal timestamps must be ordered by channel
  std::sort(tags.begin(), tags.end(), [](const TimeTag& a, const TimeTag& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.channel < b.channel;
  });
  TimeTagStream s(250);
  for (const auto& g : tags) s.push_back(g);
  return s;
}

std::string bytes_of(const TimeTagStream& s) {
  std::ostringstream out;
  write_stream(s, out);
  return out.str();
}

StreamFormatError::Reason read_failure(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    read_stream(in);
  } catch (const StreamFormatError& e) {
    return e.reason();
  }
  FAIL("stream was accepted");
  return StreamFormatError::Reason::bad_header;
}

}  // namespace

TEST_CASE("time-tag stream basics") {
  TimeTagStream s(1000);
  s.push_back({channel::fluorescence, 10});
  s.push_back({channel::herald, 20});
  s.push_back({channel::fluorescence, 20});
  CHECK(s.size() == 3);
  CHECK(s.channel_count(channel::fluorescence) == 2);
  CHECK(s.channel_ticks(channel::fluorescence) == std::vector<std::uint64_t>{10, 20});
  CHECK(s.to_ticks(1e-6) == 1000);
  CHECK(s.tick_seconds() == doctest::Approx(1e-9));
  CHECK(s.channel_times(channel::herald)[0] == doctest::Approx(20e-9));

  const auto merged = TimeTagStream::merge(1000, {{5, 20}, {10, 20}, {}, {1}});
  REQUIRE(merged.size() == 5);
  CHECK(merged[0] == TimeTag{3, 1});
  CHECK(merged[1] == TimeTag{0, 5});
  CHECK(merged[2] == TimeTag{1, 10});
  CHECK(merged[3] == TimeTag{0, 20});
  CHECK(merged[4] == TimeTag{1, 20});
}

TEST_CASE("binary stream layout") {
  const TimeTagStream empty(1000);
  const std::string b = bytes_of(empty);
  REQUIRE(b.size() == kStreamHeaderSize);
  CHECK(b.substr(0, 4) == "TTAG");
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  CHECK(static_cast<unsigned char>(b[6]) == 0xE8);  // 1000 = 0x03E8
  CHECK(b[7] == 0x03);
  CHECK(b[10] == 4);

  TimeTagStream one(1000);
  one.push_back({2, 0x0102030405060708ULL});
  const std::string r = bytes_of(one);
  REQUIRE(r.size() == kStreamHeaderSize + kStreamRecordSize);
  CHECK(r[16] == 2);
  CHECK(r[17] == 0x08);
  CHECK(r[24] == 0x01);
}

TEST_CASE("stream round trip is exact") {
  const auto s = random_stream(1'000'000, 3);
  std::istringstream in(bytes_of(s));
  const auto back = read_stream(in);
  CHECK(back.tick_ps() == 250);
  CHECK(back == s);
  std::istringstream e(bytes_of(TimeTagStream(7)));
  CHECK(read_stream(e).empty());
}

TEST_CASE("stream format errors are distinct") {
  TimeTagStream s(1000);
  s.push_back({0, 5});
  s.push_back({1, 9});
  const std::string good = bytes_of(s);

  std::string bad = good;
  bad[0] = 'X';
  CHECK(read_failure(bad) == StreamFormatError::Reason::bad_magic);
  bad = good;
  bad[4] = 2;
  CHECK(read_failure(bad) == StreamFormatError::Reason::bad_version);
  bad = good;
  bad[6] = bad[7] = bad[8] = bad[9] = 0;
  CHECK(read_failure(bad) == StreamFormatError::Reason::bad_header);
  bad = good;
  bad[12] = 1;
  CHECK(read_failure(bad) == StreamFormatError::Reason::bad_header);
  CHECK(read_failure(good.substr(0, good.size() - 1)) == StreamFormatError::Reason::truncated);
  CHECK(read_failure(good.substr(0, 10)) == StreamFormatError::Reason::truncated);
  bad = good;
  bad[kStreamHeaderSize + kStreamRecordSize + 1] = 1;  // second timestamp 9 -> 1
  CHECK(read_failure(bad) == StreamFormatError::Reason::non_monotone);
  bad = good;
  bad[kStreamHeaderSize] = 9;  // channel beyond the header count
  CHECK(read_failure(bad) == StreamFormatError::Reason::bad_header);
}

TEST_CASE("stream files") {
  const auto dir = std::filesystem::temp_directory_path() / "ionabsorb_unit_stream";
  std::filesystem::create_directories(dir);
  const auto s = random_stream(1000, 8);
  write_stream(s, dir / "a.ttag");
  CHECK(std::filesystem::file_size(dir / "a.ttag") == kStreamHeaderSize + 1000 * kStreamRecordSize);
  CHECK(read_stream(dir / "a.ttag") == s);
  CHECK_THROWS_AS(read_stream(dir / "missing.ttag"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty config gives the defaults") {
  const ExperimentConfig c = parse_config("");
  const ExperimentConfig d;
  CHECK(format_config(c) == format_config(d));
  CHECK(c.trajectory.tau0_s == doctest::Approx(1.11));
  CHECK(c.trajectory.scheme == Scheme::B);
  CHECK(parse_config("# only a comment\n\n   \n").seed == 1);
}

TEST_CASE("config values and sections") {
  const ExperimentConfig c = parse_config(R"(
kind = transfer   # trailing comment
seed = 99
[trajectory]
scheme = C
duration = 12.5
field_axis = 0, 0, 2
pulsed = false
[source]
werner_p = 0.9
pair_state = phi_minus
signal_polarization = R
[analysis]
count_threshold = 7
g2_signal = raw
[protocol]
bases = HV, DA
qwp_angles = 0, 45
[transfer]
efficiencies = 0.01, 0.1, 1
[output]
prefix = run1_
)");
  CHECK(c.kind == ExperimentKind::transfer);
  CHECK(c.seed == 99);
  CHECK(c.trajectory.scheme == Scheme::C);
  CHECK(c.trajectory.duration_s == 12.5);
  CHECK(c.trajectory.field.axis[2] == 1.0);
  CHECK(c.werner_p == 0.9);
  CHECK(c.pair_bell == BellState::phi_minus);
  CHECK(c.analysis.jumps.count_threshold == 7u);
  CHECK_FALSE(c.analysis.g2_use_jump_photons);
  CHECK(c.protocol.bases == std::vector<Basis>{Basis::HV, Basis::DA});
  CHECK(c.protocol.qwp_deg == std::vector<double>{0, 45});
  CHECK(c.transfer.efficiencies.size() == 3);
  CHECK(c.output.prefix == "run1_");
  const auto t = c.resolved_trajectory();
  CHECK(t.master_seed == 99);
  CHECK(std::norm(t.source.signal_polarization.helicity({0, 0, 1}).sigma_minus) ==
        doctest::Approx(1.0));
}

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.seed = 12345678901234ULL;
  c.trajectory.duration_s = 0.1;
  c.trajectory.r_on = 1.0 / 3.0;
  c.trajectory.source.filter_detuning_mhz = -17.25;
  c.analysis.jumps.count_threshold = 4;
  c.protocol.hwp_deg = {0.1, 0.2, 1e-300};
  c.output.prefix = "x";
  c.pulsed = true;
  c.trajectory.pump_rate_850 = 0.0;
  const std::string text = format_config(c);
  const ExperimentConfig back = parse_config(text);
  CHECK(format_config(back) == text);
  CHECK(back.trajectory.r_on == c.trajectory.r_on);
  CHECK(back.protocol.hwp_deg == c.protocol.hwp_deg);
  CHECK(back.seed == c.seed);
}

TEST_CASE("config errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("[trajectory]\ntau0 = -1\n") == 2);
  CHECK(line_of("seed = 1\nbogus = 3\n") == 2);
  CHECK(line_of("[trajectory]\nduration = fast\n") == 2);
  CHECK(line_of("[nowhere]\n") == 1);
  CHECK(line_of("[trajectory]\n\n\nscheme = E\n") == 4);
  CHECK(line_of("[source]\nherald_efficiency = 1.5\n") == 2);
  CHECK(line_of("[source]\nanalyzer = yes\n") == 2);
  CHECK(line_of("just words\n") == 1);
  CHECK(line_of("[trajectory\n") == 1);
  // cross-field violations have no single line
  CHECK(line_of("[trajectory]\nscheme = A\npulsed = true\n") == 0);
  try {
    parse_config("[trajectory]\ntau0 = -1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(e.kind() == ErrorKind::parse);
  }
}

TEST_CASE("overrides") {
  ExperimentConfig c;
  apply_override(c, "trajectory.duration=3");
  apply_override(c, "seed = 5");
  CHECK(c.trajectory.duration_s == 3.0);
  CHECK(c.seed == 5);
  CHECK_THROWS_AS(apply_override(c, "trajectory.nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "no equals sign"), ConfigError);
}

TEST_CASE("shipped presets parse") {
  const auto dir =
      std::filesystem::path(IONABSORB_TEST_DATA_DIR).parent_path().parent_path() / "configs";
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    CAPTURE(e.path().string());
    const auto c = load_config(e.path());
    CHECK(parse_config(format_config(c)).seed == c.seed);
    ++n;
  }
  CHECK(n >= 5);

  const auto qj = load_config(dir / "quantum_jumps.cfg");
  CHECK(qj.kind == ExperimentKind::quantum_jump);
  CHECK(qj.trajectory.tau0_s == doctest::Approx(1.11));
  CHECK(qj.trajectory.duration_s == doctest::Approx(50 * 60.0));
  CHECK(qj.protocol.target_added_rate == doctest::Approx(0.581));
  CHECK(qj.protocol.target_peak == doctest::Approx(83.0));
  CHECK(qj.protocol.target_background == doctest::Approx(13.6));
}

TEST_CASE("config directory from the environment") {
  const auto dir = std::filesystem::temp_directory_path() / "ionabsorb_unit_cfg";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "env_only.cfg");
    f << "seed = 31\n";
  }
  setenv(kConfigDirEnv, dir.c_str(), 1);
  CHECK(load_config("env_only.cfg").seed == 31);
  unsetenv(kConfigDirEnv);
  CHECK_THROWS_AS(load_config("env_only.cfg"), Error);
  std::filesystem::remove_all(dir);
}
