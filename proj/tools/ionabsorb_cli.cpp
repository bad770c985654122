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

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ionabsorb.h"

namespace {

struct Options {
  std::string config;
  std::string input;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

int fail(iab_status st) {
  std::cerr << "ionabsorb: " << iab_last_error() << "\n";
  return iab_exit_code(st);
}

bool write_text(const std::filesystem::path& p, const char* text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << text;
  return static_cast<bool>(f);
}

int run(const std::string& command, const Options& opt) {
  iab_config* cfg = nullptr;
  iab_status st =
      opt.config.empty() ? iab_config_default(&cfg) : iab_config_load(opt.config.c_str(), &cfg);
  if (st != IAB_OK) return fail(st);
  std::unique_ptr<iab_config, decltype(&iab_config_free)> cfg_guard(cfg, iab_config_free);
  for (const auto& s : opt.sets)
    if ((st = iab_config_set(cfg, s.c_str())) != IAB_OK) return fail(st);
  if (opt.seed && (st = iab_config_set_seed(cfg, *opt.seed)) != IAB_OK) return fail(st);

  iab_stream* input = nullptr;
  if (!opt.input.empty() && (st = iab_stream_read(opt.input.c_str(), &input)) != IAB_OK)
    return fail(st);
  std::unique_ptr<iab_stream, decltype(&iab_stream_free)> input_guard(input, iab_stream_free);

  iab_result* res = nullptr;
  if ((st = iab_run(cfg, command.c_str(), input, &res)) != IAB_OK) return fail(st);
  std::unique_ptr<iab_result, decltype(&iab_result_free)> res_guard(res, iab_result_free);

  const std::filesystem::path dir = opt.out.empty() ? iab_config_output_directory(cfg) : opt.out;
  const std::string prefix = iab_config_output_prefix(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "ionabsorb: cannot create '" << dir.string() << "': " << ec.message() << "\n";
    return iab_exit_code(IAB_ERR_IO);
  }
  bool ok = write_text(dir / (prefix + "summary.json"), iab_result_summary_json(res));
  for (std::size_t i = 0; i < iab_result_table_count(res); ++i)
    ok = ok && write_text(dir / (prefix + iab_result_table_name(res, i) + ".csv"),
                          iab_result_table_csv(res, i));
  if (!ok) {
    std::cerr << "ionabsorb: failed to write outputs under '" << dir.string() << "'\n";
    return iab_exit_code(IAB_ERR_IO);
  }
  if (const iab_stream* s = iab_result_stream(res)) {
    const std::string path = (dir / (prefix + "stream.ttag")).string();
    if ((st = iab_stream_write(s, path.c_str())) != IAB_OK) return fail(st);
  }
  std::cout << iab_result_summary_json(res) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded SPDC absorption by a single trapped ion: simulation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", iab_version());

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "simulate a time-tag record and ground-truth log"},
      {"jumps", "detect quantum jumps and fit dark-period durations"},
      {"g2", "herald / absorption-photon correlation histogram"},
      {"polar-scan", "coincidences versus signal polarization"},
      {"spectrum", "coincidences versus herald filter detuning"},
      {"entangle-scan", "coincidences versus herald analyzer angle"},
      {"transfer", "photon-to-ion state transfer fidelity"},
      {"report", "full experiment selected by the config kind"},
  };
  Options opt;
  std::string chosen;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "config file (also searched in $IONABSORB_CONFIG_DIR)");
    sub->add_option("--input", opt.input, "time-tag stream to analyse instead of simulating");
    sub->add_option("--out", opt.out, "output directory (overrides output.directory)");
    sub->add_option("--seed", opt.seed, "master seed (overrides the config seed)");
    sub->add_option("--set", opt.sets, "override a key, e.g. trajectory.duration=10")->take_all();
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return iab_exit_code(IAB_ERR_USAGE);
  }
  return run(chosen, opt);
}
