// Copyright 2026 The qlog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QLOG_ERRORS_H_
#define QLOG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace qlog {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (empty input, bad range...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The digest registry detected an inconsistency: an unknown id was used as an
// element, or a persisted table could not be read back.
class RegistryError : public Error {
 public:
  enum class Code { kUnknownId, kCorrupt, kVersionMismatch, kIo };

  RegistryError(Code code, const std::string& what)
      : Error(what), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

// A persisted analysis run is missing, unreadable or from another version.
class RunStoreError : public Error {
 public:
  enum class Code { kNotFound, kVersionMismatch, kCorrupt, kIo };

  RunStoreError(Code code, const std::string& what)
      : Error(what), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

// Malformed configuration text (rule config, prune patterns, CLI values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlog

#endif  // QLOG_ERRORS_H_
