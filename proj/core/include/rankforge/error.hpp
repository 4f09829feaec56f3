// Copyright 2026 The Rankforge Authors. All Rights Reserved.
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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rankforge {

// Malformed input text (SGF, PGN, JSONL). `offset` is a byte offset into the
// parsed text when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset = kNoOffset)
      : std::runtime_error(offset == kNoOffset
                               ? what
                               : what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

 private:
  std::size_t offset_;
};

// A value that is well-formed but outside the domain of an operation
// (empty lists, schema mismatches, out-of-range rank labels).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Bad user configuration: unknown levels, too-small pools, bad config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure talking to an evaluator backend. Carries the request id when the
// failure is tied to one request.
class BackendError : public std::runtime_error {
 public:
  explicit BackendError(const std::string& what, std::int64_t request_id = -1)
      : std::runtime_error(what), request_id_(request_id) {}

  std::int64_t request_id() const { return request_id_; }

 private:
  std::int64_t request_id_;
};

}  // namespace rankforge
