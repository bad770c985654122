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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionabsorb/config.hpp"
#include "ionabsorb/timetag.hpp"

namespace ionabsorb {

enum class Command { simulate, jumps, g2, polar_scan, spectrum, entangle_scan, transfer, report };
std::string_view command_name(Command c);
std::optional<Command> parse_command(std::string_view name);

/// Plot data; every cell is already formatted.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct RunOutput {
  std::string summary_json;  // pretty-printed, keys in fixed order
  std::vector<Table> tables;
  std::optional<TimeTagStream> stream;  // simulate only
};

/// Runs one subcommand. Analysis subcommands use `input` when given and
/// otherwise simulate the configured trajectory first. Neither argument is
/// modified.
RunOutput run_command(Command cmd, const ExperimentConfig& cfg,
                      const TimeTagStream* input = nullptr);

/// Shortest round-trip decimal form; "nan" / "inf" for non-finite values.
std::string format_number(double v);

}  // namespace ionabsorb
