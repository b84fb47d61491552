// Copyright 2026 The Style Filter Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace stylefilter {

// All library failures derive from Error; the CLI maps them to a non-zero
// exit status with the message printed verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A value or file violates a documented invariant (duplicate ids, bad shape).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Persisted artifact does not match its own checksum or header.
class CorruptError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: unknown keys, out-of-range values, missing assets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage could not run; the message is prefixed with the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace stylefilter
