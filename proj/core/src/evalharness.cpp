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

#include "rankforge/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

using nlohmann::json;

std::string to_string(EvalMode m) { return m == EvalMode::kRandom ? "random" : "player"; }

EvalMode parse_eval_mode(std::string_view s) {
  if (s == "random") return EvalMode::kRandom;
  if (s == "player") return EvalMode::kPlayer;
  throw ConfigError("unknown evaluation mode '" + std::string(s) + "'");
}

EvaluationReport accuracy_metrics(const std::vector<ActualPredicted>& pairs, int groups) {
  EvaluationReport rep;
  rep.groups = groups;
  rep.confusion.assign(groups, std::vector<long>(groups, 0));
  long hit = 0;
  long near = 0;
  for (const auto& p : pairs) {
    if (p.actual < 0 || p.actual >= groups || p.predicted < 0 || p.predicted >= groups)
      throw OutOfRangeError("group index outside [0, " + std::to_string(groups) + ")");
    ++rep.confusion[p.actual][p.predicted];
    hit += p.actual == p.predicted;
    near += std::abs(p.actual - p.predicted) <= 1;
  }
  rep.predictions = static_cast<long>(pairs.size());
  if (!pairs.empty()) {
    rep.accuracy = static_cast<double>(hit) / static_cast<double>(pairs.size());
    rep.accuracy_pm1 = static_cast<double>(near) / static_cast<double>(pairs.size());
  }
  rep.per_group_accuracy.assign(groups, 0.0);
  for (int j = 0; j < groups; ++j) {
    long row = 0;
    for (long c : rep.confusion[j]) row += c;
    if (row > 0) rep.per_group_accuracy[j] = static_cast<double>(rep.confusion[j][j]) / static_cast<double>(row);
  }
  return rep;
}

std::string EvaluationReport::to_json() const {
  json j = {{"accuracy", accuracy},
            {"accuracy_pm1", accuracy_pm1},
            {"predictions", predictions},
            {"groups", groups},
            {"per_group_accuracy", per_group_accuracy},
            {"confusion", confusion},
            {"protocol",
             {{"mode", to_string(protocol.mode)},
              {"n", protocol.n},
              {"repetitions", protocol.repetitions},
              {"seed", protocol.seed}}},
            {"excluded_players", excluded}};
  return j.dump(2);
}

void EvaluationReport::write_confusion_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "actual";
  for (int j = 0; j < groups; ++j) out << ",pred_" << j;
  out << '\n';
  for (int j = 0; j < groups; ++j) {
    out << j;
    for (long c : confusion[j]) out << ',' << c;
    out << '\n';
  }
}

Predictor model_predictor(const RankModel& model) {
  return [&model](const std::vector<const std::vector<double>*>& rows) {
    return estimate_rank_rows(model, rows).group_index;
  };
}

EvaluationReport run_random_sampling(const GroupPools& pools, const Predictor& predict, const EvalProtocol& protocol) {
  const int groups = static_cast<int>(pools.size());
  for (int j = 0; j < groups; ++j)
    if (pools[j].size() < static_cast<std::size_t>(protocol.n))
      throw ConfigError("test group " + std::to_string(j) + " has " + std::to_string(pools[j].size()) +
                        " data points, fewer than n = " + std::to_string(protocol.n));
  std::vector<ActualPredicted> pairs;
  pairs.reserve(static_cast<std::size_t>(groups) * protocol.repetitions);
  std::vector<const std::vector<double>*> rows;
  for (int j = 0; j < groups; ++j) {
    for (int r = 0; r < protocol.repetitions; ++r) {
      Rng rng(derive_seed(protocol.seed, "eval-random",
                          {static_cast<std::uint64_t>(protocol.n), static_cast<std::uint64_t>(j),
                           static_cast<std::uint64_t>(r)}));
      rows.clear();
      for (std::size_t i : sample_without_replacement(rng, pools[j].size(), protocol.n)) rows.push_back(pools[j][i]);
      pairs.push_back({j, predict(rows)});
    }
  }
  EvaluationReport rep = accuracy_metrics(pairs, groups);
  rep.protocol = protocol;
  rep.protocol.mode = EvalMode::kRandom;
  return rep;
}

PlayerPools player_pools(const FeatureStore& store, int groups) {
  std::vector<std::map<std::string, std::vector<const std::vector<double>*>>> by(groups);
  for (const FeatureRecord& r : store.records) {
    if (r.group_index < 0 || r.group_index >= groups) throw DomainError("record group out of range");
    by[r.group_index][r.player_id].push_back(&r.values);
  }
  PlayerPools out(groups);
  for (int j = 0; j < groups; ++j)
    for (auto& [id, rows] : by[j]) out[j].push_back({id, std::move(rows)});
  return out;
}

EvaluationReport run_player_specific(const PlayerPools& pools, const Predictor& predict, const EvalProtocol& protocol) {
  const int groups = static_cast<int>(pools.size());
  std::vector<ActualPredicted> pairs;
  std::vector<PlayerResult> players;
  std::vector<std::string> excluded;
  std::vector<const std::vector<double>*> rows;
  for (int j = 0; j < groups; ++j) {
    for (std::size_t p = 0; p < pools[j].size(); ++p) {
      const PlayerPool& pool = pools[j][p];
      if (pool.rows.size() < static_cast<std::size_t>(protocol.n)) {
        excluded.push_back(pool.player + " (" + std::to_string(pool.rows.size()) + " data points)");
        continue;
      }
      PlayerResult pr{j, pool.player, 0, 0};
      for (int r = 0; r < protocol.repetitions; ++r) {
        Rng rng(derive_seed(protocol.seed, "eval-player",
                            {static_cast<std::uint64_t>(protocol.n), static_cast<std::uint64_t>(j),
                             static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(r)}));
        rows.clear();
        for (std::size_t i : sample_without_replacement(rng, pool.rows.size(), protocol.n)) rows.push_back(pool.rows[i]);
        const int g = predict(rows);
        pairs.push_back({j, g});
        pr.correct += g == j;
        ++pr.total;
      }
      players.push_back(std::move(pr));
    }
  }
  EvaluationReport rep = accuracy_metrics(pairs, groups);
  rep.protocol = protocol;
  rep.protocol.mode = EvalMode::kPlayer;
  rep.excluded = std::move(excluded);
  rep.players = std::move(players);
  return rep;
}

EvaluationReport run_protocol(const FeatureStore& test, const RankModel& model, const EvalProtocol& protocol) {
  if (test.schema_id != model.schema_id)
    throw DomainError("feature store schema " + test.schema_id + " differs from model schema " + model.schema_id);
  if (protocol.n != model.n)
    throw DomainError("model trained for n = " + std::to_string(model.n) + ", protocol uses n = " +
                      std::to_string(protocol.n));
  const Predictor predict = model_predictor(model);
  if (protocol.mode == EvalMode::kRandom)
    return run_random_sampling(group_pools(test, model.groups), predict, protocol);
  return run_player_specific(player_pools(test, model.groups), predict, protocol);
}

std::vector<AblationMask> standard_masks(const std::vector<std::string>& names) {
  auto without = [&](const std::string& prefix) {
    std::vector<std::string> keep;
    for (const auto& n : names)
      if (n.rfind(prefix, 0) != 0) keep.push_back(n);
    return keep;
  };
  std::vector<AblationMask> masks{{"Use All", names}};
  const std::pair<const char*, const char*> families[] = {
      {"w/o Strength", "strength"}, {"w/o Prior", "gm:"}, {"w/o Loss", "loss:"}};
  for (const auto& [label, prefix] : families) {
    auto keep = without(prefix);
    if (keep.size() != names.size() && !keep.empty()) masks.push_back({label, std::move(keep)});
  }
  return masks;
}

std::vector<AblationRow> run_ablation(const FeatureStore& train, const FeatureStore& test,
                                      const std::vector<AblationMask>& masks, const AblationSpec& spec) {
  for (const auto& m : masks) {
    train.columns_of(m.features);
    test.columns_of(m.features);
  }
  std::vector<AblationRow> out;
  for (const auto& m : masks) {
    const FeatureStore tr = train.project(m.features);
    const FeatureStore te = test.project(m.features);
    for (int n : spec.ns) {
      const RankModel model = train_rank_model(tr, {n, spec.train_repetitions, spec.train_seed}, spec.params);
      EvalProtocol p = spec.protocol;
      p.n = n;
      out.push_back({m.name, n, run_protocol(te, model, p)});
    }
  }
  return out;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
  std::vector<std::string> masks;
  std::vector<int> ns;
  for (const auto& r : rows) {
    if (std::find(masks.begin(), masks.end(), r.mask) == masks.end()) masks.push_back(r.mask);
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "n";
  for (const auto& m : masks) out << ',' << m;
  out << '\n';
  for (int n : ns) {
    out << n;
    for (const auto& m : masks) {
      out << ',';
      for (const auto& r : rows)
        if (r.n == n && r.mask == m) out << r.report.accuracy;
    }
    out << '\n';
  }
}

void write_group_accuracy_csv(const std::vector<AblationRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const int groups = rows.empty() ? 0 : rows.front().report.groups;
  out << "mask,n";
  for (int j = 0; j < groups; ++j) out << ",g" << j;
  out << ",overall\n";
  for (const auto& r : rows) {
    out << '"' << r.mask << "\"," << r.n;
    for (double a : r.report.per_group_accuracy) out << ',' << a;
    out << ',' << r.report.accuracy << '\n';
  }
}

std::vector<GmCurveRow> gm_curves(const FeatureStore& store) {
  std::vector<GmCurveRow> out;
  const int groups = store.group_count();
  for (std::size_t c = 0; c < store.names.size(); ++c) {
    if (store.names[c].rfind("gm:", 0) != 0) continue;
    const std::string level = store.names[c].substr(3);
    for (int j = 0; j < groups; ++j) {
      std::vector<double> logs;
      for (const auto& r : store.records)
        if (r.group_index == j) logs.push_back(std::log(r.values[c]));
      if (logs.empty()) continue;
      const double m = static_cast<double>(logs.size());
      double mean = 0;
      for (double v : logs) mean += v;
      mean /= m;
      double ss = 0;
      for (double v : logs) ss += (v - mean) * (v - mean);
      const double sd = logs.size() > 1 ? std::sqrt(ss / (m - 1)) : 0.0;
      const double half = 1.96 * sd / std::sqrt(m);
      out.push_back({j, level, std::exp(mean), std::exp(mean - half), std::exp(mean + half), logs.size()});
    }
  }
  return out;
}

std::vector<PlyLossRow> loss_by_ply(const FeatureStore& store) {
  std::map<std::pair<int, int>, std::vector<double>> cells;
  for (const auto& r : store.records)
    for (const auto& l : r.losses) cells[{r.group_index, l.ply}].push_back(l.loss);
  std::vector<PlyLossRow> out;
  for (const auto& [key, v] : cells) {
    const double m = static_cast<double>(v.size());
    double mean = 0;
    for (double x : v) mean += x;
    mean /= m;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out.push_back({key.first, key.second, mean, std::sqrt(ss / m), v.size()});
  }
  return out;
}

std::vector<BoxRow> box_rows(const FeatureStore& store, int per_player, int samples, std::uint64_t seed) {
  const int groups = store.group_count();
  std::vector<BoxRow> out;
  const PlayerPools players = player_pools(store, groups);
  const GroupPools pools = group_pools(store, groups);
  std::vector<double> avg;
  std::vector<const std::vector<double>*> rows;
  for (int j = 0; j < groups; ++j) {
    for (const PlayerPool& p : players[j]) {
      if (p.rows.size() < static_cast<std::size_t>(per_player)) continue;
      rows.assign(p.rows.begin(), p.rows.begin() + per_player);
      average_rows(rows, avg);
      for (std::size_t c = 0; c < store.names.size(); ++c) out.push_back({"player", j, p.player, store.names[c], avg[c]});
    }
    if (pools[j].size() < static_cast<std::size_t>(per_player)) continue;
    for (int s = 0; s < samples; ++s) {
      Rng rng(derive_seed(seed, "box-random", {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(s)}));
      rows.clear();
      for (std::size_t i : sample_without_replacement(rng, pools[j].size(), per_player)) rows.push_back(pools[j][i]);
      average_rows(rows, avg);
      for (std::size_t c = 0; c < store.names.size(); ++c)
        out.push_back({"random", j, std::to_string(s), store.names[c], avg[c]});
    }
  }
  return out;
}

namespace {

std::ofstream open_csv(const std::string& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << header << '\n';
  return out;
}

}  // namespace

void write_gm_csv(const std::vector<GmCurveRow>& rows, const std::string& path) {
  auto out = open_csv(path, "group,level,gm,ci_low,ci_high,count");
  for (const auto& r : rows)
    out << r.group << ',' << r.level << ',' << r.gm << ',' << r.ci_low << ',' << r.ci_high << ',' << r.count << '\n';
}

void write_ply_loss_csv(const std::vector<PlyLossRow>& rows, const std::string& path) {
  auto out = open_csv(path, "group,ply,mean_loss,sd,count");
  for (const auto& r : rows) out << r.group << ',' << r.ply << ',' << r.mean << ',' << r.sd << ',' << r.count << '\n';
}

void write_box_csv(const std::vector<BoxRow>& rows, const std::string& path) {
  auto out = open_csv(path, "kind,group,unit,feature,value");
  for (const auto& r : rows)
    out << r.kind << ',' << r.group << ',' << r.unit << ',' << r.feature << ',' << r.value << '\n';
}

void write_player_csv(const EvaluationReport& report, const std::string& path) {
  auto out = open_csv(path, "group,player,correct,total,accuracy");
  for (const auto& p : report.players)
    out << p.group << ',' << p.player << ',' << p.correct << ',' << p.total << ','
        << (p.total ? static_cast<double>(p.correct) / p.total : 0.0) << '\n';
}

}  // namespace rankforge
