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

#include "ionabsorb/stream_io.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

using Reason = StreamFormatError::Reason;

template <class T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void write_stream(const TimeTagStream& stream, std::ostream& out) {
  std::string buf;
  buf.reserve(kStreamHeaderSize +
              kStreamRecordSize * std::min<std::size_t>(stream.size(), 1 << 20));
  buf.append("TTAG");
  put_le<std::uint16_t>(buf, kStreamVersion);
  put_le<std::uint32_t>(buf, stream.tick_ps());
  buf.push_back(static_cast<char>(channel::count));
  buf.append(5, '\0');
  auto ticks = stream.timestamps();
  auto chans = stream.channels();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    buf.push_back(static_cast<char>(chans[i]));
    put_le<std::uint64_t>(buf, ticks[i]);
    if (buf.size() >= (8u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorKind::io, "failed to write time-tag stream");
}

void write_stream(const TimeTagStream& stream, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  write_stream(stream, f);
}

TimeTagStream read_stream(std::istream& in) {
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 4 || std::string(data.begin(), data.begin() + 4) != "TTAG")
    throw StreamFormatError(Reason::bad_magic, "not a time-tag stream (bad magic)");
  if (data.size() < kStreamHeaderSize)
    throw StreamFormatError(Reason::truncated, "time-tag header is truncated");
  const auto version = get_le<std::uint16_t>(&data[4]);
  if (version != kStreamVersion)
    throw StreamFormatError(Reason::bad_version,
                            "unsupported time-tag stream version " + std::to_string(version));
  const auto tick_ps = get_le<std::uint32_t>(&data[6]);
  const unsigned channels = data[10];
  if (tick_ps == 0) throw StreamFormatError(Reason::bad_header, "tick resolution must be > 0");
  for (std::size_t i = 11; i < kStreamHeaderSize; ++i)
    if (data[i] != 0)
      throw StreamFormatError(Reason::bad_header, "reserved header bytes must be zero");

  const std::size_t body = data.size() - kStreamHeaderSize;
  if (body % kStreamRecordSize != 0)
    throw StreamFormatError(
        Reason::truncated,
        "truncated record at byte " +
            std::to_string(kStreamHeaderSize + body / kStreamRecordSize * kStreamRecordSize));
  TimeTagStream s(tick_ps);
  const std::size_t n = body / kStreamRecordSize;
  s.reserve(n);
  std::uint64_t prev_ts = 0;
  unsigned prev_ch = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* r = &data[kStreamHeaderSize + i * kStreamRecordSize];
    const unsigned ch = r[0];
    const auto ts = get_le<std::uint64_t>(r + 1);
    if (ch >= channels)
      throw StreamFormatError(Reason::bad_header, "record " + std::to_string(i) + " has channel " +
                                                      std::to_string(ch) +
                                                      " beyond the header count");
    if (i > 0 && (ts < prev_ts || (ts == prev_ts && ch < prev_ch)))
      throw StreamFormatError(Reason::non_monotone,
                              "record " + std::to_string(i) + " breaks timestamp order");
    s.push_back({static_cast<std::uint8_t>(ch), ts});
    prev_ts = ts;
    prev_ch = ch;
  }
  return s;
}

TimeTagStream read_stream(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return read_stream(f);
}

}  // namespace ionabsorb
