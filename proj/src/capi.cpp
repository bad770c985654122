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

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "ionabsorb.h"
#include "ionabsorb/config.hpp"
#include "ionabsorb/error.hpp"
#include "ionabsorb/report.hpp"
#include "ionabsorb/stream_io.hpp"

struct iab_config {
  ionabsorb::ExperimentConfig cfg;
};

struct iab_stream {
  ionabsorb::TimeTagStream stream;
};

struct iab_result {
  ionabsorb::RunOutput out;
  std::vector<std::string> csv;
  iab_stream stream;
};

namespace {

thread_local std::string g_last_error;

iab_status status_of(const ionabsorb::Error& e) {
  using ionabsorb::ErrorKind;
  using Reason = ionabsorb::StreamFormatError::Reason;
  if (const auto* s = dynamic_cast<const ionabsorb::StreamFormatError*>(&e)) {
    switch (s->reason()) {
      case Reason::bad_magic:
        return IAB_ERR_STREAM_MAGIC;
      case Reason::bad_version:
        return IAB_ERR_STREAM_VERSION;
      case Reason::bad_header:
        return IAB_ERR_STREAM_HEADER;
      case Reason::truncated:
        return IAB_ERR_STREAM_TRUNCATED;
      case Reason::non_monotone:
        return IAB_ERR_STREAM_ORDER;
    }
  }
  switch (e.kind()) {
    case ErrorKind::usage:
      return IAB_ERR_USAGE;
    case ErrorKind::parse:
      return IAB_ERR_PARSE;
    case ErrorKind::numeric:
      return IAB_ERR_NUMERIC;
    case ErrorKind::io:
      return IAB_ERR_IO;
  }
  return IAB_ERR_INTERNAL;
}

template <class F>
iab_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return IAB_OK;
  } catch (const ionabsorb::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IAB_ERR_INTERNAL;
  }
}

iab_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return IAB_ERR_USAGE;
}

}  // namespace

extern "C" {

const char* iab_version(void) { return "0.1.0"; }

const char* iab_last_error(void) { return g_last_error.c_str(); }

int iab_exit_code(iab_status status) {
  switch (status) {
    case IAB_OK:
      return 0;
    case IAB_ERR_USAGE:
      return 1;
    case IAB_ERR_PARSE:
    case IAB_ERR_STREAM_MAGIC:
    case IAB_ERR_STREAM_VERSION:
    case IAB_ERR_STREAM_HEADER:
    case IAB_ERR_STREAM_TRUNCATED:
    case IAB_ERR_STREAM_ORDER:
      return 2;
    case IAB_ERR_NUMERIC:
      return 3;
    case IAB_ERR_IO:
      return 4;
    case IAB_ERR_INTERNAL:
      return 5;
  }
  return 5;
}

iab_status iab_config_default(iab_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new iab_config{}; });
}

iab_status iab_config_parse(const char* text, size_t length, iab_config** out) {
  if (!out || (!text && length)) return null_argument("text/out");
  return guarded([&] {
    *out = new iab_config{ionabsorb::parse_config(std::string_view(text ? text : "", length))};
  });
}

iab_status iab_config_load(const char* path, iab_config** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded([&] { *out = new iab_config{ionabsorb::load_config(path)}; });
}

iab_status iab_config_set(iab_config* cfg, const char* assignment) {
  if (!cfg || !assignment) return null_argument("cfg/assignment");
  return guarded([&] {
    ionabsorb::ExperimentConfig copy = cfg->cfg;
    ionabsorb::apply_override(copy, assignment);
    cfg->cfg = std::move(copy);
  });
}

iab_status iab_config_set_seed(iab_config* cfg, uint64_t seed) {
  if (!cfg) return null_argument("cfg");
  cfg->cfg.seed = seed;
  g_last_error.clear();
  return IAB_OK;
}

uint64_t iab_config_seed(const iab_config* cfg) { return cfg ? cfg->cfg.seed : 0; }

const char* iab_config_output_directory(const iab_config* cfg) {
  return cfg ? cfg->cfg.output.directory.c_str() : "";
}

const char* iab_config_output_prefix(const iab_config* cfg) {
  return cfg ? cfg->cfg.output.prefix.c_str() : "";
}

iab_status iab_config_format(const iab_config* cfg, char** out) {
  if (!cfg || !out) return null_argument("cfg/out");
  return guarded([&] {
    const std::string text = ionabsorb::format_config(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void iab_config_free(iab_config* cfg) { delete cfg; }

iab_status iab_stream_create(uint32_t tick_ps, iab_stream** out) {
  if (!out) return null_argument("out");
  if (tick_ps == 0) {
    g_last_error = "tick resolution must be > 0";
    return IAB_ERR_USAGE;
  }
  return guarded([&] { *out = new iab_stream{ionabsorb::TimeTagStream(tick_ps)}; });
}

iab_status iab_stream_push(iab_stream* s, uint8_t channel, uint64_t ticks) {
  if (!s) return null_argument("stream");
  return guarded([&] {
    if (channel >= ionabsorb::channel::count) throw ionabsorb::usage_error("channel ids are 0..3");
    const auto ts = s->stream.timestamps();
    const auto ch = s->stream.channels();
    if (!ts.empty() && (ticks < ts.back() || (ticks == ts.back() && channel < ch.back())))
      throw ionabsorb::StreamFormatError(ionabsorb::StreamFormatError::Reason::non_monotone,
                                         "tag breaks timestamp order");
    s->stream.push_back({channel, ticks});
  });
}

size_t iab_stream_size(const iab_stream* s) { return s ? s->stream.size() : 0; }

uint32_t iab_stream_tick_ps(const iab_stream* s) { return s ? s->stream.tick_ps() : 0; }

iab_status iab_stream_get(const iab_stream* s, size_t index, uint8_t* channel, uint64_t* ticks) {
  if (!s || !channel || !ticks) return null_argument("stream/channel/ticks");
  if (index >= s->stream.size()) {
    g_last_error = "stream index out of range";
    return IAB_ERR_USAGE;
  }
  const auto tag = s->stream[index];
  *channel = tag.channel;
  *ticks = tag.timestamp;
  g_last_error.clear();
  return IAB_OK;
}

iab_status iab_stream_read(const char* path, iab_stream** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded(
      [&] { *out = new iab_stream{ionabsorb::read_stream(std::filesystem::path(path))}; });
}

iab_status iab_stream_write(const iab_stream* s, const char* path) {
  if (!s || !path) return null_argument("stream/path");
  return guarded([&] { ionabsorb::write_stream(s->stream, std::filesystem::path(path)); });
}

void iab_stream_free(iab_stream* s) { delete s; }

iab_status iab_run(const iab_config* cfg, const char* command, const iab_stream* input,
                   iab_result** out) {
  if (!cfg || !command || !out) return null_argument("cfg/command/out");
  const auto cmd = ionabsorb::parse_command(command);
  if (!cmd) {
    g_last_error = std::string("unknown command '") + command + "'";
    return IAB_ERR_USAGE;
  }
  return guarded([&] {
    auto* r = new iab_result{};
    try {
      r->out = ionabsorb::run_command(*cmd, cfg->cfg, input ? &input->stream : nullptr);
      for (const auto& t : r->out.tables) r->csv.push_back(t.to_csv());
      if (r->out.stream) r->stream.stream = std::move(*r->out.stream);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

const char* iab_result_summary_json(const iab_result* r) {
  return r ? r->out.summary_json.c_str() : "";
}

size_t iab_result_table_count(const iab_result* r) { return r ? r->out.tables.size() : 0; }

const char* iab_result_table_name(const iab_result* r, size_t index) {
  return r && index < r->out.tables.size() ? r->out.tables[index].name.c_str() : nullptr;
}

const char* iab_result_table_csv(const iab_result* r, size_t index) {
  return r && index < r->csv.size() ? r->csv[index].c_str() : nullptr;
}

const iab_stream* iab_result_stream(const iab_result* r) {
  return r && r->out.stream ? &r->stream : nullptr;
}

void iab_result_free(iab_result* r) { delete r; }

void iab_string_free(char* s) { std::free(s); }

}  // extern "C"
