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

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "ionabsorb/timetag.hpp"

namespace ionabsorb {

// File layout, little-endian:
//   "TTAG" | u16 version = 1 | u32 tick_ps | u8 channel_count | 5 zero bytes
// followed by 9-byte records: u8 channel | u64 timestamp (ticks).
inline constexpr std::size_t kStreamHeaderSize = 16;
inline constexpr std::size_t kStreamRecordSize = 9;
inline constexpr std::uint16_t kStreamVersion = 1;

void write_stream(const TimeTagStream& stream, std::ostream& out);
void write_stream(const TimeTagStream& stream, const std::filesystem::path& path);

/// Throws StreamFormatError (bad magic / version / header, truncated record,
/// non-monotone timestamps) or an io Error.
TimeTagStream read_stream(std::istream& in);
TimeTagStream read_stream(const std::filesystem::path& path);

}  // namespace ionabsorb
