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

// Training sets from repeated n-sample feature averaging, per-n meta-models
// and the mapping from real-valued predictions to rank groups.

#include <cstdint>
#include <string>
#include <vector>

#include "rankforge/features.hpp"
#include "rankforge/gbdt.hpp"

namespace rankforge {

struct TrainingSetSpec {
  int n = 1;
  int repetitions = 1000;  // per group
  std::uint64_t seed = 0;

  void validate() const;
};

// Feature rows of each group, indexed [group][i].
using GroupPools = std::vector<std::vector<const std::vector<double>*>>;

GroupPools group_pools(const FeatureStore& store, int groups);

// Distinct indices drawn for (group, repetition) of a training set.
std::vector<std::size_t> training_sample(const TrainingSetSpec& spec, int group, int repetition,
                                         std::size_t pool_size);

struct TrainingSet {
  Matrix x;
  std::vector<double> y;
};

TrainingSet build_training_set(const GroupPools& pools, const TrainingSetSpec& spec);

struct RankPrediction {
  double raw = 0;
  int group_index = 0;
};

// clamp(round-half-away-from-zero(raw), 0, groups - 1)
int round_to_group(double raw, int groups);

struct RankModel {
  TreeEnsemble ensemble;
  int n = 1;
  int groups = 0;
  Game game = Game::kSynthetic;
  std::vector<std::string> feature_names;
  std::string schema_id;
  std::string config_hash;

  std::string to_json() const;
  static RankModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static RankModel load(const std::string& path);
};

RankModel train_rank_model(const FeatureStore& store, const TrainingSetSpec& spec, const GbdtParams& params);

RankPrediction estimate_rank(const RankModel& model, const std::vector<FeatureVector>& vectors);
// Unchecked fast path for harness loops; rows must match the model schema.
RankPrediction estimate_rank_rows(const RankModel& model, const std::vector<const std::vector<double>*>& rows);

// Writes rows {"y":..,"x":[..]} to `rows_path` and the manifest beside it.
void write_training_set(const std::string& rows_path, const std::string& manifest_path, const TrainingSet& set,
                        const TrainingSetSpec& spec, const std::string& schema_id);

}  // namespace rankforge
