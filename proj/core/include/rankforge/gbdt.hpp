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

// Least-squares gradient-boosted regression trees with leaf-wise growth and
// exact greedy split search.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rankforge {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  void append_row(std::span<const double> values);
};

struct GbdtParams {
  int num_trees = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_samples_leaf = 20;
  double min_gain = 0.0;
  double feature_fraction = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GbdtParams&) const = default;
};

// Nodes are leaves when feature < 0. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int leaf_count() const;
  bool operator==(const Tree&) const = default;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
};

// Best split of `rows` under gain SL^2/nL + SR^2/nR - S^2/n. Candidate
// thresholds are midpoints of adjacent distinct values; ties go to the lower
// feature, then the lower threshold. Only splits with gain > min_gain and at
// least min_samples_leaf rows per side qualify.
std::optional<SplitChoice> best_split(const Matrix& x, std::span<const double> target,
                                      std::span<const std::size_t> rows, int min_samples_leaf,
                                      double min_gain = 0.0, std::span<const int> features = {});

class TreeEnsemble {
 public:
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  GbdtParams params;
  std::size_t num_features = 0;
  std::string schema_id;

  double predict(std::span<const double> x) const;
  // Prediction using only the first `t` trees.
  double predict_prefix(std::span<const double> x, std::size_t t) const;

  std::string to_json() const;
  static TreeEnsemble from_json(const std::string& text);
  bool operator==(const TreeEnsemble&) const = default;
};

inline constexpr const char* kModelFormat = "rankforge-gbdt/1";

TreeEnsemble fit(const Matrix& x, const std::vector<double>& y, const GbdtParams& params,
                 const std::string& schema_id = {});

}  // namespace rankforge
