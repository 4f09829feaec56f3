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

// Evaluation protocols (random sampling within a rank group, or sampling one
// player's own data points), accuracy metrics, ablations and plot tables.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rankforge/estimator.hpp"
#include "rankforge/features.hpp"

namespace rankforge {

enum class EvalMode { kRandom, kPlayer };

std::string to_string(EvalMode m);
EvalMode parse_eval_mode(std::string_view s);

struct EvalProtocol {
  EvalMode mode = EvalMode::kRandom;
  int n = 1;
  int repetitions = 500;  // per group (random) or per player
  std::uint64_t seed = 0;
};

struct PlayerResult {
  int group = 0;
  std::string player;
  int correct = 0;
  int total = 0;
};

struct EvaluationReport {
  int groups = 0;
  double accuracy = 0;
  double accuracy_pm1 = 0;
  std::vector<std::vector<long>> confusion;  // [actual][predicted]
  std::vector<double> per_group_accuracy;
  long predictions = 0;
  EvalProtocol protocol;
  std::vector<std::string> excluded;  // players below n data points
  std::vector<PlayerResult> players;

  std::string to_json() const;
  void write_confusion_csv(const std::string& path) const;
};

struct ActualPredicted {
  int actual = 0;
  int predicted = 0;
};

EvaluationReport accuracy_metrics(const std::vector<ActualPredicted>& pairs, int groups);

// Maps n sampled feature rows to a group index.
using Predictor = std::function<int(const std::vector<const std::vector<double>*>&)>;

Predictor model_predictor(const RankModel& model);

EvaluationReport run_random_sampling(const GroupPools& pools, const Predictor& predict, const EvalProtocol& protocol);

struct PlayerPool {
  std::string player;
  std::vector<const std::vector<double>*> rows;
};
// [group] -> players sorted by id.
using PlayerPools = std::vector<std::vector<PlayerPool>>;

PlayerPools player_pools(const FeatureStore& store, int groups);

EvaluationReport run_player_specific(const PlayerPools& pools, const Predictor& predict, const EvalProtocol& protocol);

EvaluationReport run_protocol(const FeatureStore& test, const RankModel& model, const EvalProtocol& protocol);

struct AblationMask {
  std::string name;
  std::vector<std::string> features;
};

// "Use All", "w/o Strength", "w/o Prior", "w/o Loss" for the families present.
std::vector<AblationMask> standard_masks(const std::vector<std::string>& names);

struct AblationRow {
  std::string mask;
  int n = 0;
  EvaluationReport report;
};

struct AblationSpec {
  std::vector<int> ns;
  int train_repetitions = 1000;
  std::uint64_t train_seed = 0;
  GbdtParams params;
  EvalProtocol protocol;  // n is overridden per row
};

// Masks are validated against both stores before any training starts.
std::vector<AblationRow> run_ablation(const FeatureStore& train, const FeatureStore& test,
                                      const std::vector<AblationMask>& masks, const AblationSpec& spec);

// Wide table: one row per n, one accuracy column per mask.
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);
// One row per (mask, n) with per-group accuracies and the overall value.
void write_group_accuracy_csv(const std::vector<AblationRow>& rows, const std::string& path);

struct GmCurveRow {
  int group = 0;
  std::string level;
  double gm = 0;  // exp(mean log GM)
  double ci_low = 0;
  double ci_high = 0;
  std::size_t count = 0;
};

// Per (group, level): exp(mean +- 1.96 sd / sqrt(m)) over per-data-point log GM.
std::vector<GmCurveRow> gm_curves(const FeatureStore& store);

struct PlyLossRow {
  int group = 0;
  int ply = 0;
  double mean = 0;
  double sd = 0;
  std::size_t count = 0;
};

// Needs loss traces in the store.
std::vector<PlyLossRow> loss_by_ply(const FeatureStore& store);

struct BoxRow {
  std::string kind;  // "player" or "random"
  int group = 0;
  std::string unit;  // player id or sample index
  std::string feature;
  double value = 0;
};

// Mean of each feature over each player's first `per_player` data points and
// over `samples` random draws of the same size per group.
std::vector<BoxRow> box_rows(const FeatureStore& store, int per_player, int samples, std::uint64_t seed);

void write_gm_csv(const std::vector<GmCurveRow>& rows, const std::string& path);
void write_ply_loss_csv(const std::vector<PlyLossRow>& rows, const std::string& path);
void write_box_csv(const std::vector<BoxRow>& rows, const std::string& path);
void write_player_csv(const EvaluationReport& report, const std::string& path);

}  // namespace rankforge
