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

// End-to-end wiring shared by the command-line tool and the acceptance suite:
// run configuration, backend construction, ingestion and the staged pipeline.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankforge/backends.hpp"
#include "rankforge/config.hpp"
#include "rankforge/evalharness.hpp"
#include "rankforge/features.hpp"
#include "rankforge/gbdt.hpp"
#include "rankforge/records.hpp"
#include "rankforge/synthlab.hpp"

namespace rankforge {

struct RunConfig {
  Config raw;
  Game game = Game::kSynthetic;
  std::uint64_t seed = 1;

  std::optional<SynthConfig> synth;
  int train_matches_per_group = 200;
  int test_matches_per_group = 100;
  std::string train_dataset;  // JSONL data points (real data)
  std::string test_dataset;

  BackendDescriptor strength;
  BackendDescriptor policy;
  BackendDescriptor value;

  FeatureConfig features;
  bool keep_loss_traces = true;

  std::vector<int> ns{1, 5, 10, 20};
  int train_repetitions = 1000;
  GbdtParams gbdt;

  EvalMode eval_mode = EvalMode::kRandom;
  int random_repetitions = 500;
  int player_repetitions = 5;

  bool ablate = false;
  std::vector<int> ablate_ns{10};

  FilterConfig filter;

  // Substream seeds, all derived from `seed` unless set explicitly.
  std::uint64_t train_seed = 0;
  std::uint64_t eval_seed = 0;

  static RunConfig from_config(const Config& config);
  std::string hash() const { return raw.hash(); }
  EvalProtocol protocol(int n) const;
};

// Builds the three evaluator roles. Roles sharing a launch command share one
// connection; external backends are cached when RANKFORGE_CACHE is set.
BackendSet make_backends(const RunConfig& run);

struct IngestReject {
  std::string source;
  std::string reason;
  std::string detail;
};

struct IngestResult {
  std::vector<DataPoint> points;
  std::vector<IngestReject> rejects;
  std::size_t files = 0;
  std::size_t matches = 0;
};

// Reads every .sgf and .pgn file under `dir` (sorted by path), filters each
// match and splits accepted ones into two data points.
IngestResult ingest_directory(const std::string& dir, const FilterConfig& filter);
void write_reject_csv(const std::vector<IngestReject>& rejects, const std::string& path);

struct PipelineResult {
  FeatureStore train;
  FeatureStore test;
  std::map<int, EvaluationReport> reports;
  std::vector<AblationRow> ablation;
};

// Runs data -> extract -> train -> eval -> (ablate) -> report, writing every
// artifact under `out_dir`. A failing stage throws StageError.
PipelineResult run_pipeline(const RunConfig& run, const std::string& out_dir);

class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Synthetic train and test data points for a run configuration.
std::vector<DataPoint> synthetic_split(const RunConfig& run, bool train);

}  // namespace rankforge
