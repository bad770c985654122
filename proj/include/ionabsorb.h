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

#ifndef IONABSORB_H
#define IONABSORB_H

#include <stddef.h>
#include <stdint.h>

#if defined(IONABSORB_BUILDING_LIBRARY)
#define IONABSORB_API __attribute__((visibility("default")))
#else
#define IONABSORB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct iab_config iab_config;
typedef struct iab_stream iab_stream;
typedef struct iab_result iab_result;

typedef enum iab_status {
  IAB_OK = 0,
  IAB_ERR_USAGE = 1,
  IAB_ERR_PARSE = 2,
  IAB_ERR_NUMERIC = 3,
  IAB_ERR_IO = 4,
  /* Stream format failures; all map to exit code 2. */
  IAB_ERR_STREAM_MAGIC = 10,
  IAB_ERR_STREAM_VERSION = 11,
  IAB_ERR_STREAM_HEADER = 12,
  IAB_ERR_STREAM_TRUNCATED = 13,
  IAB_ERR_STREAM_ORDER = 14,
  IAB_ERR_INTERNAL = 99
} iab_status;

IONABSORB_API const char* iab_version(void);

/* Message of the last failure on the calling thread; empty after success. */
IONABSORB_API const char* iab_last_error(void);

/* 0 ok, 1 usage, 2 parse, 3 numeric; io and internal failures give 4 and 5. */
IONABSORB_API int iab_exit_code(iab_status status);

IONABSORB_API iab_status iab_config_default(iab_config** out);
IONABSORB_API iab_status iab_config_parse(const char* text, size_t length, iab_config** out);
/* Relative paths that do not exist are retried under $IONABSORB_CONFIG_DIR. */
IONABSORB_API iab_status iab_config_load(const char* path, iab_config** out);
/* "section.key=value"; the config is unchanged on failure. */
IONABSORB_API iab_status iab_config_set(iab_config* cfg, const char* assignment);
IONABSORB_API iab_status iab_config_set_seed(iab_config* cfg, uint64_t seed);
IONABSORB_API uint64_t iab_config_seed(const iab_config* cfg);
/* Output directory and file prefix from the [output] section. */
IONABSORB_API const char* iab_config_output_directory(const iab_config* cfg);
IONABSORB_API const char* iab_config_output_prefix(const iab_config* cfg);
/* Canonical text; release with iab_string_free. */
IONABSORB_API iab_status iab_config_format(const iab_config* cfg, char** out);
IONABSORB_API void iab_config_free(iab_config* cfg);

IONABSORB_API iab_status iab_stream_create(uint32_t tick_ps, iab_stream** out);
/* Appends one tag; fails with IAB_ERR_STREAM_ORDER if it would break ordering. */
IONABSORB_API iab_status iab_stream_push(iab_stream* s, uint8_t channel, uint64_t ticks);
IONABSORB_API size_t iab_stream_size(const iab_stream* s);
IONABSORB_API uint32_t iab_stream_tick_ps(const iab_stream* s);
IONABSORB_API iab_status iab_stream_get(const iab_stream* s, size_t index, uint8_t* channel,
                                        uint64_t* ticks);
IONABSORB_API iab_status iab_stream_read(const char* path, iab_stream** out);
IONABSORB_API iab_status iab_stream_write(const iab_stream* s, const char* path);
IONABSORB_API void iab_stream_free(iab_stream* s);

/* Commands: simulate, jumps, g2, polar-scan, spectrum, entangle-scan, transfer,
 * report. `input` may be NULL. */
IONABSORB_API iab_status iab_run(const iab_config* cfg, const char* command,
                                 const iab_stream* input, iab_result** out);
IONABSORB_API const char* iab_result_summary_json(const iab_result* r);
IONABSORB_API size_t iab_result_table_count(const iab_result* r);
IONABSORB_API const char* iab_result_table_name(const iab_result* r, size_t index);
IONABSORB_API const char* iab_result_table_csv(const iab_result* r, size_t index);
/* Borrowed; NULL unless the command produced a stream. */
IONABSORB_API const iab_stream* iab_result_stream(const iab_result* r);
IONABSORB_API void iab_result_free(iab_result* r);

IONABSORB_API void iab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* IONABSORB_H */
