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

// Skill-parametrized synthetic games. Every state offers M moves with hidden
// qualities; a player of skill s perceives them through skill-dependent noise
// and picks a move from a softmax over perceived quality. Strength, policy and
// value answers all derive from the same hidden qualities.

#include <cstdint>
#include <memory>
#include <map>
#include <string>
#include <vector>

#include "rankforge/backends.hpp"
#include "rankforge/config.hpp"
#include "rankforge/records.hpp"

namespace rankforge {

struct SynthConfig {
  int groups = 8;              // R; group j plays at skill j
  int moves_per_state = 16;    // M
  int plies_per_match = 80;
  // Inverse temperature lambda(s) = lambda0 + lambda1 * s.
  double lambda0 = 0.6;
  double lambda1 = 0.06;
  // Perception noise sd(s) = perception_sd * exp(-perception_decay * s),
  // correlated across nearby skills with kernel width perception_width.
  double perception_sd = 0.6;
  double perception_decay = 0.25;
  double perception_width = 1.0;
  double player_offset_sd = 0.0;
  int players_per_group = 0;  // 0: every side is an anonymous player
  std::vector<double> level_skills;  // policy levels; empty means 0..R-1
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<double> levels() const;
  std::vector<std::string> level_labels() const;

  // Reads keys under `prefix` (e.g. "synth."); missing keys keep defaults.
  static SynthConfig from_config(const Config& config, const std::string& prefix = "synth.");
  std::string canonical() const;
};

// Label used for a policy level of the given skill, e.g. "2" or "2.5".
std::string skill_label(double skill);
double parse_skill_label(const std::string& label);

// Numerically stable softmax and log-softmax.
std::vector<double> softmax(const std::vector<double>& z);
std::vector<double> log_softmax(const std::vector<double>& z);

class SynthModel {
 public:
  explicit SynthModel(SynthConfig config);

  const SynthConfig& config() const { return config_; }

  struct StateDraws {
    std::vector<double> quality;  // M
    std::vector<double> noise;    // M x R, row-major by move
  };

  StateDraws draws(std::uint64_t state_key) const;
  double inverse_temperature(double skill) const;
  double noise_scale(double skill) const;
  std::vector<double> logits(const StateDraws& d, double skill) const;
  std::vector<double> policy(const StateDraws& d, double skill) const { return softmax(logits(d, skill)); }

  // Index of the move chosen with uniform variate u under the skill's policy.
  int choose(const StateDraws& d, double skill, double u) const;

  static std::string state_name(std::uint64_t key);
  static std::string move_name(int index);

 private:
  SynthConfig config_;
};

struct SynthPly {
  std::string state;
  int move = 0;
  double quality = 0;
};

struct SynthMatch {
  std::string match_id;
  int true_group = 0;
  std::string black_player;
  std::string white_player;
  double black_skill = 0;
  double white_skill = 0;
  std::vector<SynthPly> plies;  // black moves on odd plies
};

// Deterministic in (seed, tag, group, index).
SynthMatch gen_match(const SynthModel& model, int group, std::uint64_t index, const std::string& tag);

// Both sides of `matches_per_group` matches for every group, as data points.
std::vector<DataPoint> synth_datapoints(const SynthModel& model, int matches_per_group, const std::string& tag);
std::pair<DataPoint, DataPoint> match_datapoints(const SynthMatch& match);

// In-process backend answering all three evaluation kinds:
//   strength(state, mK) = q_K
//   policy(state, mK, level) = softmax(lambda(s) * perceived quality)_K
//   value(state) = max q;  value(state/mK) = -q_K (mover of the successor)
class SyntheticBackend : public Backend {
 public:
  explicit SyntheticBackend(std::shared_ptr<const SynthModel> model);

  std::string identity() const override;
  std::vector<std::string> levels() const override;
  std::vector<EvalOutcome> evaluate(const std::vector<EvalQuery>& queries) override;

  // Fixed answers for value queries, keyed by exact state string.
  void set_value(const std::string& state, double value) { value_table_[state] = value; }

  EvalOutcome answer(const EvalQuery& q) const;

 private:
  std::shared_ptr<const SynthModel> model_;
  std::map<std::string, double> value_table_;
  std::string identity_;
};

struct OracleResult {
  double accuracy = 0;
  double accuracy_pm1 = 0;
  int trials = 0;
};

// Likelihood-ratio classifier over the generator itself: each trial draws n
// data points from a uniformly chosen group and predicts the group whose
// policy gives the played moves the highest total log-likelihood.
OracleResult bayes_oracle_accuracy(const SynthModel& model, int n, int trials, std::uint64_t seed);

}  // namespace rankforge
