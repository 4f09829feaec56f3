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

#include "rankforge/estimator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

using nlohmann::json;

void TrainingSetSpec::validate() const {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
}

GroupPools group_pools(const FeatureStore& store, int groups) {
  GroupPools pools(static_cast<std::size_t>(groups));
  for (const FeatureRecord& r : store.records) {
    if (r.group_index < 0 || r.group_index >= groups)
      throw DomainError("record " + r.match_id + " has group " + std::to_string(r.group_index) +
                        " outside [0, " + std::to_string(groups) + ")");
    pools[r.group_index].push_back(&r.values);
  }
  return pools;
}

std::vector<std::size_t> training_sample(const TrainingSetSpec& spec, int group, int repetition,
                                         std::size_t pool_size) {
  Rng rng(derive_seed(spec.seed, "train-sample",
                      {static_cast<std::uint64_t>(spec.n), static_cast<std::uint64_t>(group),
                       static_cast<std::uint64_t>(repetition)}));
  return sample_without_replacement(rng, pool_size, static_cast<std::size_t>(spec.n));
}

TrainingSet build_training_set(const GroupPools& pools, const TrainingSetSpec& spec) {
  spec.validate();
  for (std::size_t j = 0; j < pools.size(); ++j)
    if (pools[j].size() < static_cast<std::size_t>(spec.n))
      throw ConfigError("group " + std::to_string(j) + " has " + std::to_string(pools[j].size()) +
                        " data points, fewer than n = " + std::to_string(spec.n));
  TrainingSet set;
  std::vector<const std::vector<double>*> rows;
  std::vector<double> avg;
  for (std::size_t j = 0; j < pools.size(); ++j) {
    for (int r = 0; r < spec.repetitions; ++r) {
      rows.clear();
      for (std::size_t i : training_sample(spec, static_cast<int>(j), r, pools[j].size())) rows.push_back(pools[j][i]);
      average_rows(rows, avg);
      set.x.append_row(avg);
      set.y.push_back(static_cast<double>(j));
    }
  }
  return set;
}

int round_to_group(double raw, int groups) {
  const double r = std::round(raw);
  if (!(r > 0)) return 0;
  if (r >= groups - 1) return groups - 1;
  return static_cast<int>(r);
}

std::string RankModel::to_json() const {
  json j = {{"n", n},
            {"groups", groups},
            {"game", to_string(game)},
            {"feature_names", feature_names},
            {"schema_id", schema_id},
            {"config_hash", config_hash},
            {"ensemble", json::parse(ensemble.to_json())}};
  return j.dump();
}

RankModel RankModel::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RankModel m;
    m.n = j.at("n").get<int>();
    m.groups = j.at("groups").get<int>();
    m.game = parse_game(j.at("game").get<std::string>());
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.schema_id = j.at("schema_id").get<std::string>();
    m.config_hash = j.value("config_hash", std::string{});
    m.ensemble = TreeEnsemble::from_json(j.at("ensemble").dump());
    if (m.ensemble.schema_id != m.schema_id) throw ParseError("model schema ids disagree");
    if (m.ensemble.num_features != m.feature_names.size()) throw ParseError("model width disagrees with names");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad rank model: ") + e.what());
  }
}

void RankModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json() << '\n';
}

RankModel RankModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

RankModel train_rank_model(const FeatureStore& store, const TrainingSetSpec& spec, const GbdtParams& params) {
  RankModel m;
  m.n = spec.n;
  m.groups = store.group_count();
  m.game = store.game;
  m.feature_names = store.names;
  m.schema_id = store.schema_id;
  const TrainingSet set = build_training_set(group_pools(store, m.groups), spec);
  m.ensemble = fit(set.x, set.y, params, store.schema_id);
  return m;
}

RankPrediction estimate_rank_rows(const RankModel& model, const std::vector<const std::vector<double>*>& rows) {
  std::vector<double> avg;
  average_rows(rows, avg);
  RankPrediction p;
  p.raw = model.ensemble.predict(avg);
  p.group_index = round_to_group(p.raw, model.groups);
  return p;
}

RankPrediction estimate_rank(const RankModel& model, const std::vector<FeatureVector>& vectors) {
  if (static_cast<int>(vectors.size()) != model.n)
    throw DomainError("model was trained for n = " + std::to_string(model.n) + ", got " +
                      std::to_string(vectors.size()) + " vectors");
  for (const FeatureVector& v : vectors)
    if (v.schema_id != model.schema_id) throw DomainError("feature schema " + v.schema_id + " differs from model " + model.schema_id);
  std::vector<const std::vector<double>*> rows;
  for (const FeatureVector& v : vectors) rows.push_back(&v.values);
  return estimate_rank_rows(model, rows);
}

void write_training_set(const std::string& rows_path, const std::string& manifest_path, const TrainingSet& set,
                        const TrainingSetSpec& spec, const std::string& schema_id) {
  std::ofstream out(rows_path);
  if (!out) throw std::runtime_error("cannot write " + rows_path);
  std::vector<double> row;
  for (std::size_t i = 0; i < set.x.rows; ++i) {
    auto r = set.x.row(i);
    row.assign(r.begin(), r.end());
    out << json{{"y", set.y[i]}, {"x", row}}.dump() << '\n';
  }
  std::ofstream man(manifest_path);
  if (!man) throw std::runtime_error("cannot write " + manifest_path);
  man << json{{"n", spec.n}, {"seed", spec.seed}, {"repetitions", spec.repetitions}, {"schema_id", schema_id}}.dump(2)
      << '\n';
}

}  // namespace rankforge
