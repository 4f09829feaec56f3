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

// Evaluator boundary: strength scorers, multi-level policy banks and value
// evaluators. Every backend answers batches of queries; one outcome per query.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankforge/records.hpp"

namespace rankforge {

enum class EvalKind { kStrength, kPolicy, kValue };

std::string to_string(EvalKind k);
EvalKind parse_eval_kind(std::string_view s);

struct EvalQuery {
  EvalKind kind = EvalKind::kStrength;
  std::string state;
  std::optional<std::string> move;   // strength, policy
  std::optional<std::string> level;  // policy

  bool operator==(const EvalQuery&) const = default;
};

struct EvalOutcome {
  std::optional<double> value;
  std::string error;  // set when value is empty

  bool ok() const { return value.has_value(); }
  static EvalOutcome success(double v) { return {v, {}}; }
  static EvalOutcome failure(std::string e) { return {std::nullopt, std::move(e)}; }
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Stable name used in cache keys.
  virtual std::string identity() const = 0;

  // Level labels the backend can answer policy queries for, in order.
  virtual std::vector<std::string> levels() const { return {}; }

  virtual std::vector<EvalOutcome> evaluate(const std::vector<EvalQuery>& queries) = 0;

  // Convenience single-query call; throws BackendError on failure.
  double evaluate_one(const EvalQuery& query);
};

struct BackendDescriptor {
  EvalKind kind = EvalKind::kStrength;
  std::vector<std::string> levels;
  std::string launch;  // shell command line or "builtin:synthetic"
  Game game = Game::kSynthetic;
  double timeout_seconds = 30.0;
};

// Persistent response cache. Lines are {"key":..., "value":...}; errors are
// never cached.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::string path);

  static std::string key(const std::string& identity, const EvalQuery& q);

  std::optional<double> get(const std::string& key) const;
  void put(const std::string& key, double value);
  std::size_t size() const { return entries_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, double> entries_;
  std::unique_ptr<std::ofstream> out_;
};

class CachedBackend : public Backend {
 public:
  CachedBackend(std::shared_ptr<Backend> inner, std::shared_ptr<ResponseCache> cache);

  std::string identity() const override { return inner_->identity(); }
  std::vector<std::string> levels() const override { return inner_->levels(); }
  std::vector<EvalOutcome> evaluate(const std::vector<EvalQuery>& queries) override;

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::shared_ptr<Backend> inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Talks the line-delimited JSON protocol to a child process:
//   request  {"id":N,"kind":"strength"|"policy"|"value","state":S,"move":M|null,"level":L|null}
//   response {"id":N,"value":X} or {"id":N,"error":E}
// Responses may arrive in any order. A request without a response within the
// timeout yields a failed outcome; late answers to it are discarded.
class SubprocessBackend : public Backend {
 public:
  SubprocessBackend(std::string command, std::string identity, std::vector<std::string> levels = {},
                    double timeout_seconds = 30.0, std::size_t max_in_flight = 256);
  ~SubprocessBackend() override;

  SubprocessBackend(const SubprocessBackend&) = delete;
  SubprocessBackend& operator=(const SubprocessBackend&) = delete;

  std::string identity() const override { return identity_; }
  std::vector<std::string> levels() const override { return levels_; }
  std::vector<EvalOutcome> evaluate(const std::vector<EvalQuery>& queries) override;

  std::size_t timeouts() const { return timeouts_; }

 private:
  void start();
  void stop();

  std::string command_;
  std::string identity_;
  std::vector<std::string> levels_;
  double timeout_seconds_;
  std::size_t max_in_flight_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  std::int64_t next_id_ = 1;
  std::size_t timeouts_ = 0;
};

std::string request_to_json(std::int64_t id, const EvalQuery& q);
// Parses a response line into (id, outcome); throws ParseError on bad JSON.
std::pair<std::int64_t, EvalOutcome> response_from_json(const std::string& line);

// Chess win-rate transform with the rate first clamped to [eps, 1 - eps].
inline constexpr double kWinRateEpsilon = 1e-6;
double logit(double wr);
// Same, counting how many inputs needed clamping.
double logit_counted(double wr, std::size_t& clamped);

inline constexpr double kPriorFloor = 1e-10;

// The three evaluator roles used by feature extraction. The same backend may
// fill several roles.
struct BackendSet {
  Game game = Game::kSynthetic;
  std::shared_ptr<Backend> strength;
  std::shared_ptr<Backend> policy;
  std::shared_ptr<Backend> value;
};

double score_strength(Backend& b, const std::string& state, const std::string& move);
double policy_prior(Backend& b, const std::string& state, const std::string& move, const std::string& level);
double evaluate_state(Backend& b, const std::string& state);

}  // namespace rankforge
