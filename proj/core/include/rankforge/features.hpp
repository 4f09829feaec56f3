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

// Per-data-point features: mean strength score, one prior geometric mean per
// policy level and loss statistics under a ply cutoff.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankforge/backends.hpp"
#include "rankforge/config.hpp"
#include "rankforge/records.hpp"

namespace rankforge {

enum class LossStat { kMean, kMedian, kStd };

struct LossSelection {
  LossStat stat = LossStat::kMean;
  std::optional<int> n_cut;  // empty keeps every ply

  // "mean@50", "median@inf", "std@100".
  std::string name() const;
  static LossSelection parse(const std::string& text);
  bool operator==(const LossSelection&) const = default;
};

struct FeatureConfig {
  Game game = Game::kSynthetic;
  std::vector<std::string> policy_levels;
  std::vector<LossSelection> loss_selected;
  bool include_strength = true;
  bool include_priors = true;
  bool include_loss = true;

  void validate() const;
  // Column names in schema order: "strength", "gm:<level>"..., "loss:<sel>"...
  std::vector<std::string> names() const;
  std::string schema_id() const;

  static FeatureConfig from_config(const Config& config, Game game, const std::string& prefix = "features.");
};

std::string schema_id_of(Game game, const std::vector<std::string>& names);

struct FeatureVector {
  std::vector<double> values;
  std::string schema_id;
};

double mean_strength(const std::vector<double>& betas);
// exp(mean(log p)); every p must already be floored to a positive value.
double prior_geomean(const std::vector<double>& priors);

struct PlyLoss {
  int ply = 0;
  double loss = 0;  // deterioration v - v' (positive = mistake)

  bool operator==(const PlyLoss&) const = default;
};

// Mover-perspective deterioration per move. Chess values go through logit;
// `clamped` counts win rates that needed clamping.
std::vector<PlyLoss> move_losses(const DataPoint& dp, Backend& value_backend, Game game,
                                 std::size_t* clamped = nullptr);

// Statistic over losses with ply <= n_cut; nullopt when nothing survives.
std::optional<double> loss_stat(const std::vector<PlyLoss>& losses, LossStat stat, std::optional<int> n_cut);

FeatureVector average_features(const std::vector<FeatureVector>& vectors);
// Element-wise mean of equal-length rows; no schema checks.
void average_rows(const std::vector<const std::vector<double>*>& rows, std::vector<double>& out);

struct FeatureRecord {
  std::string match_id;
  std::string player_id;
  Side side = Side::kBlack;
  int group_index = 0;
  std::vector<double> values;
  bool flagged = false;           // a loss statistic had no surviving moves
  std::vector<PlyLoss> losses;    // kept only on request

  bool operator==(const FeatureRecord&) const = default;
};

struct DropEntry {
  std::string match_id;
  Side side = Side::kBlack;
  std::string player_id;
  std::string reason;

  bool operator==(const DropEntry&) const = default;
};

struct FeatureStore {
  Game game = Game::kSynthetic;
  std::vector<std::string> names;
  std::string schema_id;
  std::vector<FeatureRecord> records;
  std::vector<DropEntry> drops;
  std::size_t clamped_win_rates = 0;

  std::size_t width() const { return names.size(); }
  // Column indices of `subset` (names must all exist; throws ConfigError).
  std::vector<std::size_t> columns_of(const std::vector<std::string>& subset) const;
  FeatureStore project(const std::vector<std::string>& subset) const;
  int group_count() const;

  // Header line {"schema":{...}} followed by one record per line.
  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  static FeatureStore read(std::istream& in);
  static FeatureStore read_file(const std::string& path);
  void write_drops_csv(const std::string& path) const;
};

struct ExtractOptions {
  bool keep_loss_traces = false;
};

struct ExtractResult {
  std::optional<FeatureRecord> record;
  std::string drop_reason;
};

ExtractResult extract_one(const DataPoint& dp, BackendSet& backends, const FeatureConfig& config,
                          const ExtractOptions& options = {}, std::size_t* clamped = nullptr);

// Records sorted by (match_id, side); failures become drop entries.
FeatureStore extract_features(const std::vector<DataPoint>& points, BackendSet& backends,
                              const FeatureConfig& config, const ExtractOptions& options = {});

}  // namespace rankforge
