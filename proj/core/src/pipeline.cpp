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

#include "rankforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rankforge/dataset.hpp"
#include "rankforge/error.hpp"
#include "rankforge/estimator.hpp"
#include "rankforge/pgn.hpp"
#include "rankforge/rng.hpp"
#include "rankforge/sgf.hpp"

namespace rankforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<int> get_ints(const Config& c, const std::string& key, const std::vector<int>& fallback) {
  std::vector<double> fb(fallback.begin(), fallback.end());
  std::vector<int> out;
  for (double v : c.get_doubles(key, fb)) {
    if (v != std::floor(v) || v < 1) throw ConfigError(key + " must hold positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

BackendDescriptor descriptor(const Config& c, EvalKind kind, Game game) {
  BackendDescriptor d;
  d.kind = kind;
  d.game = game;
  const std::string role = to_string(kind);
  d.launch = c.get_string("backends." + role, game == Game::kSynthetic ? "builtin:synthetic" : "");
  d.timeout_seconds = c.get_double("backends.timeout", 30.0);
  if (kind == EvalKind::kPolicy) d.levels = c.get_strings("backends.policy_levels", {});
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

RunConfig RunConfig::from_config(const Config& c) {
  RunConfig r;
  r.raw = c;
  r.game = parse_game(c.get_string("game", "synthetic"));
  r.seed = static_cast<std::uint64_t>(c.get_int("seed", 1));
  if (r.game == Game::kSynthetic) {
    SynthConfig s = SynthConfig::from_config(c);
    if (!c.contains("synth.seed")) s.seed = derive_seed(r.seed, "synth");
    r.synth = s;
  }
  r.train_matches_per_group = static_cast<int>(c.get_int("data.train_matches_per_group", 200));
  r.test_matches_per_group = static_cast<int>(c.get_int("data.test_matches_per_group", 100));
  r.train_dataset = c.get_string("data.train_dataset", "");
  r.test_dataset = c.get_string("data.test_dataset", "");

  r.strength = descriptor(c, EvalKind::kStrength, r.game);
  r.policy = descriptor(c, EvalKind::kPolicy, r.game);
  r.value = descriptor(c, EvalKind::kValue, r.game);
  if (r.synth && r.policy.levels.empty()) r.policy.levels = r.synth->level_labels();

  r.features.game = r.game;
  r.features.policy_levels = c.get_strings("features.policy_levels", r.policy.levels);
  for (const auto& s : c.get_strings("features.loss", {})) r.features.loss_selected.push_back(LossSelection::parse(s));
  r.features.include_strength = c.get_bool("features.strength", true);
  r.features.include_priors = c.get_bool("features.priors", true);
  r.features.include_loss = c.get_bool("features.loss_enabled", true);
  r.features.validate();
  r.keep_loss_traces = c.get_bool("report.loss_traces", true);

  r.ns = get_ints(c, "train.ns", r.ns);
  r.train_repetitions = static_cast<int>(c.get_int("train.repetitions", 1000));
  r.gbdt.num_trees = static_cast<int>(c.get_int("gbdt.num_trees", r.gbdt.num_trees));
  r.gbdt.learning_rate = c.get_double("gbdt.learning_rate", r.gbdt.learning_rate);
  r.gbdt.max_leaves = static_cast<int>(c.get_int("gbdt.max_leaves", r.gbdt.max_leaves));
  r.gbdt.min_samples_leaf = static_cast<int>(c.get_int("gbdt.min_samples_leaf", r.gbdt.min_samples_leaf));
  r.gbdt.min_gain = c.get_double("gbdt.min_gain", r.gbdt.min_gain);
  r.gbdt.feature_fraction = c.get_double("gbdt.feature_fraction", r.gbdt.feature_fraction);
  r.gbdt.seed = static_cast<std::uint64_t>(c.get_int("gbdt.seed", static_cast<std::int64_t>(derive_seed(r.seed, "gbdt") >> 1)));
  r.gbdt.validate();

  r.eval_mode = parse_eval_mode(c.get_string("eval.mode", "random"));
  r.random_repetitions = static_cast<int>(c.get_int("eval.repetitions", 500));
  r.player_repetitions = static_cast<int>(c.get_int("eval.player_repetitions", 5));
  r.ablate = c.get_bool("ablate.enabled", false);
  r.ablate_ns = get_ints(c, "ablate.ns", r.ablate_ns);

  r.filter.go_min_plies = static_cast<int>(c.get_int("filter.go_min_plies", r.filter.go_min_plies));
  r.filter.chess_min_plies = static_cast<int>(c.get_int("filter.chess_min_plies", r.filter.chess_min_plies));
  r.filter.blitz_min_seconds = c.get_double("filter.blitz_min_seconds", r.filter.blitz_min_seconds);
  r.filter.blitz_max_seconds = c.get_double("filter.blitz_max_seconds", r.filter.blitz_max_seconds);
  if (c.contains("filter.date_from")) r.filter.date_from = c.get_string("filter.date_from", "");
  if (c.contains("filter.date_to")) r.filter.date_to = c.get_string("filter.date_to", "");

  r.train_seed = derive_seed(r.seed, "train");
  r.eval_seed = derive_seed(r.seed, "eval");
  if (r.game != Game::kSynthetic && (r.strength.launch.empty() || r.value.launch.empty() || r.policy.launch.empty())) {
    if ((r.features.include_strength && r.strength.launch.empty()) ||
        (r.features.include_priors && r.policy.launch.empty()) ||
        (r.features.include_loss && r.value.launch.empty()))
      throw ConfigError("real-data runs need a backends.<role> launch command for every enabled feature family");
  }
  return r;
}

EvalProtocol RunConfig::protocol(int n) const {
  EvalProtocol p;
  p.mode = eval_mode;
  p.n = n;
  p.repetitions = eval_mode == EvalMode::kRandom ? random_repetitions : player_repetitions;
  p.seed = eval_seed;
  return p;
}

BackendSet make_backends(const RunConfig& run) {
  BackendSet set;
  set.game = run.game;
  std::shared_ptr<const SynthModel> model;
  std::shared_ptr<ResponseCache> cache;
  if (const char* path = std::getenv("RANKFORGE_CACHE"); path && *path) cache = std::make_shared<ResponseCache>(path);
  std::map<std::string, std::shared_ptr<Backend>> by_launch;
  auto build = [&](const BackendDescriptor& d) -> std::shared_ptr<Backend> {
    if (d.launch.empty()) return nullptr;
    if (auto it = by_launch.find(d.launch); it != by_launch.end()) return it->second;
    std::shared_ptr<Backend> b;
    if (d.launch == "builtin:synthetic") {
      if (!run.synth) throw ConfigError("builtin:synthetic backend needs a [synth] section");
      if (!model) model = std::make_shared<const SynthModel>(*run.synth);
      b = std::make_shared<SyntheticBackend>(model);
    } else {
      b = std::make_shared<SubprocessBackend>(d.launch, "cmd:" + d.launch, run.policy.levels, d.timeout_seconds);
      if (cache) b = std::make_shared<CachedBackend>(b, cache);
    }
    by_launch[d.launch] = b;
    return b;
  };
  set.strength = build(run.strength);
  set.policy = build(run.policy);
  set.value = build(run.value);
  return set;
}

IngestResult ingest_directory(const std::string& dir, const FilterConfig& filter) {
  IngestResult res;
  if (!fs::is_directory(dir)) throw ConfigError("records directory " + dir + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (ext == ".sgf" || ext == ".pgn") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    ++res.files;
    const std::string rel = fs::relative(f, dir).generic_string();
    const std::string text = read_file(f);
    std::vector<std::pair<std::string, std::string>> games;
    if (f.extension() == ".pgn") {
      const auto parts = split_pgn_games(text);
      for (std::size_t i = 0; i < parts.size(); ++i)
        games.emplace_back(parts.size() == 1 ? rel : rel + "#" + std::to_string(i + 1), parts[i]);
    } else {
      games.emplace_back(rel, text);
    }
    for (const auto& [id, body] : games) {
      ++res.matches;
      MatchRecord rec;
      try {
        rec = f.extension() == ".pgn" ? parse_pgn(body) : parse_sgf(body);
      } catch (const ParseError& e) {
        res.rejects.push_back({id, "parse_error", e.what()});
        continue;
      }
      const FilterDecision d = filter_match(rec, filter);
      if (!d.accepted) {
        res.rejects.push_back({id, to_string(*d.reason), d.detail});
        continue;
      }
      auto [b, w] = split_sides(rec, id);
      res.points.push_back(std::move(b));
      res.points.push_back(std::move(w));
    }
  }
  return res;
}

void write_reject_csv(const std::vector<IngestReject>& rejects, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "source,reason,detail\n";
  for (const auto& r : rejects) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), '"', '\'');
    out << r.source << ',' << r.reason << ",\"" << detail << "\"\n";
  }
}

std::vector<DataPoint> synthetic_split(const RunConfig& run, bool train) {
  if (!run.synth) throw ConfigError("synthetic data needs a [synth] section");
  const SynthModel model(*run.synth);
  return synth_datapoints(model, train ? run.train_matches_per_group : run.test_matches_per_group,
                          train ? "train" : "test");
}

PipelineResult run_pipeline(const RunConfig& run, const std::string& out_dir) {
  const fs::path out(out_dir);
  PipelineResult res;
  std::string stage = "data";
  try {
    fs::create_directories(out / "data");
    fs::create_directories(out / "features");
    fs::create_directories(out / "models");
    fs::create_directories(out / "report" / "plotdata");

    std::vector<DataPoint> train_points;
    std::vector<DataPoint> test_points;
    if (run.game == Game::kSynthetic && run.train_dataset.empty()) {
      train_points = synthetic_split(run, true);
      test_points = synthetic_split(run, false);
    } else {
      if (run.train_dataset.empty() || run.test_dataset.empty())
        throw ConfigError("data.train_dataset and data.test_dataset are required for real data");
      train_points = read_dataset_file(run.train_dataset);
      test_points = read_dataset_file(run.test_dataset);
    }
    write_dataset_file((out / "data" / "train.jsonl").string(), train_points);
    write_dataset_file((out / "data" / "test.jsonl").string(), test_points);

    stage = "extract";
    BackendSet backends = make_backends(run);
    ExtractOptions opts;
    opts.keep_loss_traces = run.keep_loss_traces;
    res.train = extract_features(train_points, backends, run.features, {});
    res.test = extract_features(test_points, backends, run.features, opts);
    res.train.write_file((out / "features" / "train.jsonl").string());
    res.test.write_file((out / "features" / "test.jsonl").string());
    res.train.write_drops_csv((out / "features" / "train_drops.csv").string());
    res.test.write_drops_csv((out / "features" / "test_drops.csv").string());

    stage = "train";
    std::map<int, RankModel> models;
    for (int n : run.ns) {
      RankModel m = train_rank_model(res.train, {n, run.train_repetitions, run.train_seed}, run.gbdt);
      m.config_hash = run.hash();
      m.save((out / "models" / ("model_n" + std::to_string(n) + ".json")).string());
      models.emplace(n, std::move(m));
    }

    stage = "eval";
    json metrics = json::object();
    for (int n : run.ns) {
      EvaluationReport rep = run_protocol(res.test, models.at(n), run.protocol(n));
      const fs::path dir = out / "report" / ("n" + std::to_string(n));
      fs::create_directories(dir);
      write_text(dir / "metrics.json", rep.to_json() + "\n");
      rep.write_confusion_csv((dir / "confusion.csv").string());
      if (rep.protocol.mode == EvalMode::kPlayer) write_player_csv(rep, (dir / "players.csv").string());
      metrics[std::to_string(n)] = {{"accuracy", rep.accuracy},
                                    {"accuracy_pm1", rep.accuracy_pm1},
                                    {"per_group_accuracy", rep.per_group_accuracy}};
      res.reports.emplace(n, std::move(rep));
    }
    json summary = {{"config_hash", run.hash()},
                    {"schema_id", res.train.schema_id},
                    {"mode", to_string(run.eval_mode)},
                    {"by_n", metrics},
                    {"drops", {{"train", res.train.drops.size()}, {"test", res.test.drops.size()}}}};
    write_text(out / "report" / "metrics.json", summary.dump(2) + "\n");

    if (run.ablate) {
      stage = "ablate";
      AblationSpec spec;
      spec.ns = run.ablate_ns;
      spec.train_repetitions = run.train_repetitions;
      spec.train_seed = run.train_seed;
      spec.params = run.gbdt;
      spec.protocol = run.protocol(1);
      res.ablation = run_ablation(res.train, res.test, standard_masks(res.train.names), spec);
      write_ablation_csv(res.ablation, (out / "report" / "ablation.csv").string());
      write_group_accuracy_csv(res.ablation, (out / "report" / "ablation_groups.csv").string());
    }

    stage = "report";
    write_gm_csv(gm_curves(res.test), (out / "report" / "plotdata" / "gm_curves.csv").string());
    write_ply_loss_csv(loss_by_ply(res.test), (out / "report" / "plotdata" / "ply_loss.csv").string());
    write_box_csv(box_rows(res.test, 20, 100, derive_seed(run.seed, "box")),
                  (out / "report" / "plotdata" / "box.csv").string());

    json manifest = {{"config_hash", run.hash()},
                     {"config", run.raw.canonical()},
                     {"seed", run.seed},
                     {"train_seed", run.train_seed},
                     {"eval_seed", run.eval_seed},
                     {"gbdt_seed", run.gbdt.seed},
                     {"schema_id", res.train.schema_id},
                     {"features", res.train.names},
                     {"ci_method", "exp(mean(log gm) +- 1.96 sd / sqrt(m))"},
                     {"loss_sign", "deterioration = v - v'"}};
    if (run.synth) manifest["synth_seed"] = run.synth->seed;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
  return res;
}

}  // namespace rankforge
