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

// rankforge: ingest game records, extract features, train per-n rank models
// and evaluate them.
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rankforge/config.hpp"
#include "rankforge/dataset.hpp"
#include "rankforge/error.hpp"
#include "rankforge/estimator.hpp"
#include "rankforge/evalharness.hpp"
#include "rankforge/features.hpp"
#include "rankforge/pipeline.hpp"
#include "rankforge/rng.hpp"
#include "rankforge/synthlab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rankforge;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "TOML-style run configuration");
  cmd->add_option("--set", c.overrides, "Override a configuration key (key=value); repeatable");
}

Config load_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  for (const auto& o : c.overrides) cfg.set_from_string(o);
  return cfg;
}

void log(const std::string& msg) { std::cerr << "rankforge: " << msg << '\n'; }

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

void ensure_parent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rankforge: player strength estimation from game records"};
  app.require_subcommand(1);

  // ingest
  Common ingest_c;
  std::string ingest_records, ingest_out, ingest_drops;
  auto* ingest = app.add_subcommand("ingest", "Parse, filter and split SGF/PGN records into data points");
  add_common(ingest, ingest_c);
  ingest->add_option("--records", ingest_records, "Directory of .sgf/.pgn files")->required();
  ingest->add_option("--out", ingest_out, "Output dataset (JSONL)")->required();
  ingest->add_option("--drops", ingest_drops, "Drop report CSV (default: <out>.drops.csv)");

  // synth
  Common synth_c;
  std::string synth_out, synth_tag = "synth";
  int synth_matches = 100;
  auto* synth = app.add_subcommand("synth", "Generate synthetic matches as data points");
  add_common(synth, synth_c);
  synth->add_option("--matches", synth_matches, "Matches per group");
  synth->add_option("--tag", synth_tag, "Name prefix and random substream of the generated matches");
  synth->add_option("--out", synth_out, "Output dataset (JSONL)")->required();

  // extract
  Common extract_c;
  std::string extract_dataset, extract_out;
  bool extract_traces = false;
  auto* extract = app.add_subcommand("extract", "Compute feature vectors for a dataset");
  add_common(extract, extract_c);
  extract->add_option("--dataset", extract_dataset, "Input dataset (JSONL)")->required();
  extract->add_option("--out", extract_out, "Output feature store (JSONL)")->required();
  extract->add_flag("--traces", extract_traces, "Keep per-move losses for plot data");

  // train
  Common train_c;
  std::string train_features, train_out, train_rows;
  int train_n = 10;
  auto* train = app.add_subcommand("train", "Train a rank model for one n");
  add_common(train, train_c);
  train->add_option("--features", train_features, "Training feature store")->required();
  train->add_option("--n", train_n, "Data points averaged per sample");
  train->add_option("--out", train_out, "Output model (JSON)")->required();
  train->add_option("--rows", train_rows, "Also write the averaged training rows (JSONL)");

  // eval
  Common eval_c;
  std::string eval_model, eval_features, eval_out, eval_mode = "random";
  int eval_n = 10;
  int eval_reps = -1;
  auto* eval = app.add_subcommand("eval", "Evaluate a rank model on a test feature store");
  add_common(eval, eval_c);
  eval->add_option("--mode", eval_mode, "random or player")->check(CLI::IsMember({"random", "player"}));
  eval->add_option("--n", eval_n, "Data points per prediction");
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--features", eval_features, "Test feature store")->required();
  eval->add_option("--repetitions", eval_reps, "Samples per group (random) or per player");
  eval->add_option("--out", eval_out, "Report directory")->required();

  // ablate
  Common ablate_c;
  std::string ablate_train, ablate_test, ablate_out;
  std::vector<int> ablate_ns;
  auto* ablate = app.add_subcommand("ablate", "Retrain and evaluate without each feature family");
  add_common(ablate, ablate_c);
  ablate->add_option("--train", ablate_train, "Training feature store")->required();
  ablate->add_option("--test", ablate_test, "Test feature store")->required();
  ablate->add_option("--n", ablate_ns, "Values of n (repeatable)");
  ablate->add_option("--out", ablate_out, "Report directory")->required();

  // report
  Common report_c;
  std::string report_features, report_out;
  auto* report = app.add_subcommand("report", "Write plot tables for a feature store");
  add_common(report, report_c);
  report->add_option("--features", report_features, "Feature store")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  // pipeline
  Common pipe_c;
  std::string pipe_out;
  bool pipe_ablate = false;
  auto* pipeline = app.add_subcommand("pipeline", "Run extract, train, eval and report end to end");
  add_common(pipeline, pipe_c);
  pipeline->add_option("--out", pipe_out, "Run directory")->required();
  pipeline->add_flag("--ablate", pipe_ablate, "Also run the feature-family ablation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ingest) {
      const RunConfig run = RunConfig::from_config(load_config(ingest_c));
      const IngestResult res = ingest_directory(ingest_records, run.filter);
      if (res.files == 0) log("warning: no .sgf or .pgn files under " + ingest_records);
      ensure_parent(ingest_out);
      write_dataset_file(ingest_out, res.points);
      write_reject_csv(res.rejects, ingest_drops.empty() ? ingest_out + ".drops.csv" : ingest_drops);
      log(std::to_string(res.matches) + " matches, " + std::to_string(res.points.size()) + " data points, " +
          std::to_string(res.rejects.size()) + " rejected");
      return kExitOk;
    }
    if (*synth) {
      const RunConfig run = RunConfig::from_config(load_config(synth_c));
      if (!run.synth) throw ConfigError("synth needs game = \"synthetic\"");
      const SynthModel model(*run.synth);
      ensure_parent(synth_out);
      write_dataset_file(synth_out, synth_datapoints(model, synth_matches, synth_tag));
      return kExitOk;
    }
    if (*extract) {
      const RunConfig run = RunConfig::from_config(load_config(extract_c));
      BackendSet backends = make_backends(run);
      ExtractOptions opts;
      opts.keep_loss_traces = extract_traces;
      const FeatureStore store = extract_features(read_dataset_file(extract_dataset), backends, run.features, opts);
      ensure_parent(extract_out);
      store.write_file(extract_out);
      store.write_drops_csv(extract_out + ".drops.csv");
      log(std::to_string(store.records.size()) + " feature records, " + std::to_string(store.drops.size()) +
          " dropped");
      return kExitOk;
    }
    if (*train) {
      const RunConfig run = RunConfig::from_config(load_config(train_c));
      const FeatureStore store = FeatureStore::read_file(train_features);
      const TrainingSetSpec spec{train_n, run.train_repetitions, run.train_seed};
      if (!train_rows.empty()) {
        const TrainingSet set = build_training_set(group_pools(store, store.group_count()), spec);
        ensure_parent(train_rows);
        write_training_set(train_rows, train_rows + ".manifest.json", set, spec, store.schema_id);
      }
      RankModel m = train_rank_model(store, spec, run.gbdt);
      m.config_hash = run.hash();
      ensure_parent(train_out);
      m.save(train_out);
      return kExitOk;
    }
    if (*eval) {
      RunConfig run = RunConfig::from_config(load_config(eval_c));
      run.eval_mode = parse_eval_mode(eval_mode);
      if (eval_reps > 0) (run.eval_mode == EvalMode::kRandom ? run.random_repetitions : run.player_repetitions) = eval_reps;
      const RankModel model = RankModel::load(eval_model);
      const FeatureStore store = FeatureStore::read_file(eval_features);
      const EvaluationReport rep = run_protocol(store, model, run.protocol(eval_n));
      const fs::path out(eval_out);
      write_text(out / "metrics.json", rep.to_json() + "\n");
      rep.write_confusion_csv((out / "confusion.csv").string());
      fs::create_directories(out / "plotdata");
      write_gm_csv(gm_curves(store), (out / "plotdata" / "gm_curves.csv").string());
      write_ply_loss_csv(loss_by_ply(store), (out / "plotdata" / "ply_loss.csv").string());
      if (rep.protocol.mode == EvalMode::kPlayer) write_player_csv(rep, (out / "plotdata" / "players.csv").string());
      std::cout << "accuracy " << rep.accuracy << " accuracy_pm1 " << rep.accuracy_pm1 << '\n';
      return kExitOk;
    }
    if (*ablate) {
      const RunConfig run = RunConfig::from_config(load_config(ablate_c));
      const FeatureStore tr = FeatureStore::read_file(ablate_train);
      const FeatureStore te = FeatureStore::read_file(ablate_test);
      AblationSpec spec;
      spec.ns = ablate_ns.empty() ? run.ablate_ns : ablate_ns;
      spec.train_repetitions = run.train_repetitions;
      spec.train_seed = run.train_seed;
      spec.params = run.gbdt;
      spec.protocol = run.protocol(1);
      const auto rows = run_ablation(tr, te, standard_masks(tr.names), spec);
      fs::create_directories(ablate_out);
      write_ablation_csv(rows, (fs::path(ablate_out) / "ablation.csv").string());
      write_group_accuracy_csv(rows, (fs::path(ablate_out) / "ablation_groups.csv").string());
      return kExitOk;
    }
    if (*report) {
      const RunConfig run = RunConfig::from_config(load_config(report_c));
      const FeatureStore store = FeatureStore::read_file(report_features);
      const fs::path out(report_out);
      fs::create_directories(out);
      write_gm_csv(gm_curves(store), (out / "gm_curves.csv").string());
      write_ply_loss_csv(loss_by_ply(store), (out / "ply_loss.csv").string());
      write_box_csv(box_rows(store, 20, 100, derive_seed(run.seed, "box")), (out / "box.csv").string());
      return kExitOk;
    }
    if (*pipeline) {
      Config cfg = load_config(pipe_c);
      if (pipe_ablate) cfg.set_from_string("ablate.enabled=true");
      const RunConfig run = RunConfig::from_config(cfg);
      const PipelineResult res = run_pipeline(run, pipe_out);
      for (const auto& [n, rep] : res.reports)
        std::cout << "n=" << n << " accuracy " << rep.accuracy << " accuracy_pm1 " << rep.accuracy_pm1 << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    log("configuration error: " + std::string(e.what()));
    return kExitConfig;
  } catch (const StageError& e) {
    log(e.what());
    return kExitData;
  } catch (const std::exception& e) {
    log("error: " + std::string(e.what()));
    return kExitData;
  }
  return kExitOk;
}
