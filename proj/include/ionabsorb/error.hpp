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

#include <stdexcept>
#include <string>

namespace ionabsorb {

// Coarse failure classes; these map one-to-one onto CLI exit codes.
enum class ErrorKind {
  usage = 1,    // invalid argument or configuration combination
  parse = 2,    // malformed input text or binary stream
  numeric = 3,  // fit/EM non-convergence, degenerate data
  io = 4,       // file system failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return Error(ErrorKind::usage, what); }
inline Error numeric_error(const std::string& what) { return Error(ErrorKind::numeric, what); }

class StreamFormatError : public Error {
 public:
  enum class Reason { bad_magic, bad_version, bad_header, truncated, non_monotone };

  StreamFormatError(Reason reason, const std::string& what)
      : Error(ErrorKind::parse, what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(ErrorKind::parse, line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ionabsorb
