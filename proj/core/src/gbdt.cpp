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

#include "rankforge/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

using nlohmann::json;

void Matrix::append_row(std::span<const double> values) {
  if (rows == 0 && cols == 0) cols = values.size();
  if (values.size() != cols) throw DomainError("row width differs from matrix width");
  data.insert(data.end(), values.begin(), values.end());
  ++rows;
}

void GbdtParams::validate() const {
  if (num_trees < 1) throw ConfigError("num_trees must be at least 1");
  if (max_leaves < 2) throw ConfigError("max_leaves must be at least 2");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (!(feature_fraction > 0 && feature_fraction <= 1)) throw ConfigError("feature_fraction must be in (0, 1]");
  if (!(min_gain >= 0)) throw ConfigError("min_gain must be non-negative");
}

double Tree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes[n].feature >= 0) n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
  return nodes[n].value;
}

int Tree::leaf_count() const {
  int c = 0;
  for (const auto& n : nodes) c += n.feature < 0;
  return c;
}

namespace {

// Scans rows sorted ascending by feature f and updates `best` on strictly
// larger gain.
void scan_feature(const Matrix& x, std::span<const double> target, const std::size_t* sorted, std::size_t n,
                  int f, int min_leaf, double total, std::optional<SplitChoice>& best, double min_gain) {
  const std::size_t msl = static_cast<std::size_t>(min_leaf);
  if (n < 2 * msl) return;
  const double parent = total * total / static_cast<double>(n);
  double left = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left += target[sorted[i]];
    const std::size_t nl = i + 1;
    if (nl < msl) continue;
    if (n - nl < msl) break;
    const double a = x.at(sorted[i], f);
    const double b = x.at(sorted[i + 1], f);
    if (!(a < b)) continue;
    const double right = total - left;
    const double gain = left * left / static_cast<double>(nl) + right * right / static_cast<double>(n - nl) - parent;
    const double floor = best ? best->gain : min_gain;
    if (gain > floor) {
      double thr = a + (b - a) * 0.5;
      if (!(thr < b)) thr = a;
      best = SplitChoice{f, thr, gain, nl};
    }
  }
}

}  // namespace

std::optional<SplitChoice> best_split(const Matrix& x, std::span<const double> target,
                                      std::span<const std::size_t> rows, int min_samples_leaf, double min_gain,
                                      std::span<const int> features) {
  std::vector<int> feats(features.begin(), features.end());
  if (feats.empty()) {
    feats.resize(x.cols);
    std::iota(feats.begin(), feats.end(), 0);
  }
  double total = 0;
  for (std::size_t r : rows) total += target[r];
  std::optional<SplitChoice> best;
  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  for (int f : feats) {
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      const double va = x.at(a, f), vb = x.at(b, f);
      return va < vb || (va == vb && a < b);
    });
    scan_feature(x, target, sorted.data(), sorted.size(), f, min_samples_leaf, total, best, min_gain);
  }
  return best;
}

double TreeEnsemble::predict(std::span<const double> x) const { return predict_prefix(x, trees.size()); }

double TreeEnsemble::predict_prefix(std::span<const double> x, std::size_t t) const {
  if (x.size() != num_features)
    throw DomainError("feature row has " + std::to_string(x.size()) + " values, model expects " +
                      std::to_string(num_features));
  double p = base_score;
  const std::size_t count = std::min(t, trees.size());
  for (std::size_t i = 0; i < count; ++i) p += learning_rate * trees[i].predict(x);
  return p;
}

namespace {

struct Leaf {
  int node;
  std::size_t begin;
  std::size_t end;
  std::optional<SplitChoice> split;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<std::vector<std::size_t>>& presorted, const GbdtParams& params)
      : x_(x), presorted_(presorted), params_(params), goes_left_(x.rows), scratch_(x.rows) {}

  // Grows one tree on `residual`; returns nullopt when the root cannot split.
  std::optional<Tree> grow(const std::vector<double>& residual, const std::vector<int>& features) {
    const std::size_t n = x_.rows;
    order_ = presorted_;
    Tree tree;
    tree.nodes.push_back({});
    std::vector<Leaf> leaves;
    leaves.push_back({0, 0, n, std::nullopt});
    evaluate(leaves.back(), residual, features);
    if (!leaves.back().split) return std::nullopt;

    while (static_cast<int>(leaves.size()) < params_.max_leaves) {
      int pick = -1;
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (!leaves[i].split) continue;
        if (pick < 0 || leaves[i].split->gain > leaves[pick].split->gain) pick = static_cast<int>(i);
      }
      if (pick < 0) break;
      Leaf leaf = leaves[pick];
      const SplitChoice s = *leaf.split;
      const std::size_t mid = partition(leaf, s);
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& parent = tree.nodes[leaf.node];
      parent.feature = s.feature;
      parent.threshold = s.threshold;
      parent.left = l;
      parent.right = l + 1;
      leaves[pick] = {l, leaf.begin, mid, std::nullopt};
      leaves.insert(leaves.begin() + pick + 1, Leaf{l + 1, mid, leaf.end, std::nullopt});
      evaluate(leaves[pick], residual, features);
      evaluate(leaves[pick + 1], residual, features);
    }
    // Leaves are stored in creation order of their segments; values are
    // residual means.
    leaf_rows_.clear();
    for (const Leaf& leaf : leaves) {
      double sum = 0;
      const auto& seg = order_[0];
      for (std::size_t i = leaf.begin; i < leaf.end; ++i) sum += residual[seg[i]];
      tree.nodes[leaf.node].value = sum / static_cast<double>(leaf.end - leaf.begin);
      leaf_rows_.push_back({leaf.node, leaf.begin, leaf.end, std::nullopt});
    }
    return tree;
  }

  // Rows per leaf of the last grown tree, as segments of order_[0].
  const std::vector<Leaf>& leaf_segments() const { return leaf_rows_; }
  const std::vector<std::size_t>& rows_by(int f) const { return order_[f]; }

 private:
  void evaluate(Leaf& leaf, const std::vector<double>& residual, const std::vector<int>& features) {
    const std::size_t n = leaf.end - leaf.begin;
    double total = 0;
    const auto& any = order_[0];
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) total += residual[any[i]];
    std::optional<SplitChoice> best;
    for (int f : features)
      scan_feature(x_, residual, order_[f].data() + leaf.begin, n, f, params_.min_samples_leaf, total, best,
                   params_.min_gain);
    leaf.split = best;
  }

  std::size_t partition(const Leaf& leaf, const SplitChoice& s) {
    const auto& by_f = order_[s.feature];
    for (std::size_t i = leaf.begin; i < leaf.end; ++i)
      goes_left_[by_f[i]] = x_.at(by_f[i], s.feature) <= s.threshold;
    std::size_t mid = leaf.begin;
    for (auto& seg : order_) {
      std::size_t w = leaf.begin;
      std::size_t k = 0;
      for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
        const std::size_t r = seg[i];
        if (goes_left_[r]) seg[w++] = r;
        else scratch_[k++] = r;
      }
      mid = w;
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(k), seg.begin() + static_cast<std::ptrdiff_t>(w));
    }
    return mid;
  }

  const Matrix& x_;
  const std::vector<std::vector<std::size_t>>& presorted_;
  const GbdtParams& params_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<char> goes_left_;
  std::vector<std::size_t> scratch_;
  std::vector<Leaf> leaf_rows_;
};

}  // namespace

TreeEnsemble fit(const Matrix& x, const std::vector<double>& y, const GbdtParams& params,
                 const std::string& schema_id) {
  params.validate();
  if (x.rows != y.size()) throw DomainError("fit: row count differs from target count");
  if (x.rows < 2) throw DomainError("fit needs at least two rows");
  if (x.cols < 1) throw DomainError("fit needs at least one feature");
  for (double v : x.data)
    if (std::isnan(v)) throw DomainError("fit: NaN in features");
  for (double v : y)
    if (std::isnan(v)) throw DomainError("fit: NaN in targets");

  TreeEnsemble model;
  model.params = params;
  model.learning_rate = params.learning_rate;
  model.num_features = x.cols;
  model.schema_id = schema_id;
  double mean = 0;
  for (std::size_t i = 0; i < y.size(); ++i) mean += (y[i] - mean) / static_cast<double>(i + 1);
  model.base_score = mean;

  std::vector<std::vector<std::size_t>> presorted(x.cols, std::vector<std::size_t>(x.rows));
  for (std::size_t f = 0; f < x.cols; ++f) {
    auto& idx = presorted[f];
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x.at(a, f) < x.at(b, f); });
  }

  std::vector<double> pred(x.rows, model.base_score);
  std::vector<double> residual(x.rows);
  TreeBuilder builder(x, presorted, params);
  const int all = static_cast<int>(x.cols);
  const int take = std::max(1, static_cast<int>(std::lround(params.feature_fraction * all)));
  for (int t = 0; t < params.num_trees; ++t) {
    std::vector<int> features;
    if (take >= all) {
      features.resize(all);
      std::iota(features.begin(), features.end(), 0);
    } else {
      Rng rng(derive_seed(params.seed, "gbdt-features", {static_cast<std::uint64_t>(t)}));
      for (std::size_t f : sample_without_replacement(rng, all, take)) features.push_back(static_cast<int>(f));
      std::sort(features.begin(), features.end());
    }
    for (std::size_t i = 0; i < x.rows; ++i) residual[i] = y[i] - pred[i];
    auto tree = builder.grow(residual, features);
    if (!tree) {
      if (take >= all) break;
      continue;
    }
    const auto& rows = builder.rows_by(0);
    for (const auto& leaf : builder.leaf_segments()) {
      const double step = model.learning_rate * tree->nodes[leaf.node].value;
      for (std::size_t i = leaf.begin; i < leaf.end; ++i) pred[rows[i]] += step;
    }
    model.trees.push_back(std::move(*tree));
  }
  return model;
}

std::string TreeEnsemble::to_json() const {
  json trees_json = json::array();
  for (const Tree& t : trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees_json.push_back(std::move(nodes));
  }
  json j = {{"format", kModelFormat},
            {"schema_id", schema_id},
            {"num_features", num_features},
            {"base_score", base_score},
            {"learning_rate", learning_rate},
            {"params",
             {{"num_trees", params.num_trees},
              {"learning_rate", params.learning_rate},
              {"max_leaves", params.max_leaves},
              {"min_samples_leaf", params.min_samples_leaf},
              {"min_gain", params.min_gain},
              {"feature_fraction", params.feature_fraction},
              {"seed", params.seed}}},
            {"trees", std::move(trees_json)}};
  return j.dump();
}

TreeEnsemble TreeEnsemble::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kModelFormat)
      throw ParseError("unsupported model format '" + j.at("format").get<std::string>() + "'");
    TreeEnsemble m;
    m.schema_id = j.at("schema_id").get<std::string>();
    m.num_features = j.at("num_features").get<std::size_t>();
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    const json& p = j.at("params");
    m.params.num_trees = p.at("num_trees").get<int>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.max_leaves = p.at("max_leaves").get<int>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    m.params.min_gain = p.at("min_gain").get<double>();
    m.params.feature_fraction = p.at("feature_fraction").get<double>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    for (const json& tj : j.at("trees")) {
      Tree t;
      for (const json& nj : tj) {
        TreeNode n{nj.at(0).get<int>(), nj.at(1).get<double>(), nj.at(2).get<int>(), nj.at(3).get<int>(),
                   nj.at(4).get<double>()};
        t.nodes.push_back(n);
      }
      const int count = static_cast<int>(t.nodes.size());
      for (const TreeNode& n : t.nodes) {
        if (n.feature >= static_cast<int>(m.num_features)) throw ParseError("split feature out of range");
        if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count))
          throw ParseError("split child index out of range");
      }
      if (t.nodes.empty()) throw ParseError("empty tree");
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model file: ") + e.what());
  }
}

}  // namespace rankforge
