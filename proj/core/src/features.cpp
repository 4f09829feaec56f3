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

#include "rankforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"
#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

using nlohmann::json;

namespace {

std::string stat_name(LossStat s) {
  switch (s) {
    case LossStat::kMean: return "mean";
    case LossStat::kMedian: return "median";
    case LossStat::kStd: return "std";
  }
  return "?";
}

}  // namespace

std::string LossSelection::name() const {
  return stat_name(stat) + "@" + (n_cut ? std::to_string(*n_cut) : std::string("inf"));
}

LossSelection LossSelection::parse(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) throw ConfigError("loss selection '" + text + "' must look like mean@50");
  const std::string s = text.substr(0, at);
  const std::string cut = text.substr(at + 1);
  LossSelection sel;
  if (s == "mean") sel.stat = LossStat::kMean;
  else if (s == "median") sel.stat = LossStat::kMedian;
  else if (s == "std") sel.stat = LossStat::kStd;
  else throw ConfigError("unknown loss statistic '" + s + "'");
  if (cut != "inf") {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cut, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cut.size() || v < 1) throw ConfigError("bad ply cutoff '" + cut + "'");
    sel.n_cut = v;
  }
  return sel;
}

void FeatureConfig::validate() const {
  const bool priors = include_priors && !policy_levels.empty();
  const bool loss = include_loss && !loss_selected.empty();
  if (!include_strength && !priors && !loss) throw ConfigError("feature config enables no feature family");
  std::set<std::string> seen(policy_levels.begin(), policy_levels.end());
  if (seen.size() != policy_levels.size()) throw ConfigError("policy levels must be distinct");
}

std::vector<std::string> FeatureConfig::names() const {
  std::vector<std::string> out;
  if (include_strength) out.push_back("strength");
  if (include_priors)
    for (const auto& l : policy_levels) out.push_back("gm:" + l);
  if (include_loss)
    for (const auto& s : loss_selected) out.push_back("loss:" + s.name());
  return out;
}

std::string schema_id_of(Game game, const std::vector<std::string>& names) {
  std::string text = to_string(game);
  for (const auto& n : names) text += '\n' + n;
  return hex64(fnv1a64(text));
}

std::string FeatureConfig::schema_id() const { return schema_id_of(game, names()); }

FeatureConfig FeatureConfig::from_config(const Config& c, Game game, const std::string& p) {
  FeatureConfig f;
  f.game = game;
  f.policy_levels = c.get_strings(p + "policy_levels", {});
  for (const auto& s : c.get_strings(p + "loss", {})) f.loss_selected.push_back(LossSelection::parse(s));
  f.include_strength = c.get_bool(p + "strength", true);
  f.include_priors = c.get_bool(p + "priors", true);
  f.include_loss = c.get_bool(p + "loss_enabled", true);
  f.validate();
  return f;
}

double mean_strength(const std::vector<double>& betas) {
  if (betas.empty()) throw DomainError("mean_strength of an empty list");
  double sum = 0;
  for (double b : betas) sum += b;
  return sum / static_cast<double>(betas.size());
}

double prior_geomean(const std::vector<double>& priors) {
  if (priors.empty()) throw DomainError("prior_geomean of an empty list");
  double acc = 0;
  for (double p : priors) {
    if (!(p > 0)) throw std::logic_error("prior_geomean received a non-positive prior");
    acc += std::log(p);
  }
  return std::exp(acc / static_cast<double>(priors.size()));
}

namespace {

double transform_value(double raw, Game game, std::size_t* clamped) {
  if (game != Game::kChess) return raw;
  std::size_t c = 0;
  const double v = logit_counted(raw, c);
  if (clamped) *clamped += c;
  return v;
}

// Value queries for the chosen moves; returns an error text on failure.
std::string compute_losses(const DataPoint& dp, const std::vector<std::size_t>& which, Backend& backend,
                           Game game, std::size_t* clamped, std::vector<PlyLoss>& out) {
  std::vector<EvalQuery> queries;
  queries.reserve(which.size() * 2);
  for (std::size_t i : which) {
    const MoveEntry& m = dp.moves[i];
    std::string succ;
    try {
      succ = successor_state(game, m.state, m.move);
    } catch (const DomainError& e) {
      return "ply " + std::to_string(m.ply) + ": " + e.what();
    }
    queries.push_back({EvalKind::kValue, m.state, std::nullopt, std::nullopt});
    queries.push_back({EvalKind::kValue, std::move(succ), std::nullopt, std::nullopt});
  }
  const auto res = backend.evaluate(queries);
  for (std::size_t q = 0; q < res.size(); ++q)
    if (!res[q].ok()) return "value: " + res[q].error;
  out.clear();
  for (std::size_t k = 0; k < which.size(); ++k) {
    const double v = transform_value(*res[2 * k].value, game, clamped);
    const double v_next = -transform_value(*res[2 * k + 1].value, game, clamped);
    out.push_back({dp.moves[which[k]].ply, v - v_next});
  }
  return {};
}

}  // namespace

std::vector<PlyLoss> move_losses(const DataPoint& dp, Backend& value_backend, Game game, std::size_t* clamped) {
  std::vector<std::size_t> all(dp.moves.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<PlyLoss> out;
  const std::string err = compute_losses(dp, all, value_backend, game, clamped, out);
  if (!err.empty()) throw BackendError(err);
  return out;
}

std::optional<double> loss_stat(const std::vector<PlyLoss>& losses, LossStat stat, std::optional<int> n_cut) {
  std::vector<double> v;
  for (const PlyLoss& l : losses)
    if (!n_cut || l.ply <= *n_cut) v.push_back(l.loss);
  if (v.empty()) return std::nullopt;
  const double n = static_cast<double>(v.size());
  switch (stat) {
    case LossStat::kMean: {
      double s = 0;
      for (double x : v) s += x;
      return s / n;
    }
    case LossStat::kMedian: {
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      return v.size() % 2 == 1 ? v[h] : (v[h - 1] + v[h]) / 2;
    }
    case LossStat::kStd: {
      double s = 0;
      for (double x : v) s += x;
      const double mean = s / n;
      double ss = 0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return std::sqrt(ss / n);
    }
  }
  return std::nullopt;
}

FeatureVector average_features(const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw DomainError("average_features of an empty list");
  std::vector<const std::vector<double>*> rows;
  for (const FeatureVector& v : vectors) {
    if (v.schema_id != vectors.front().schema_id || v.values.size() != vectors.front().values.size())
      throw DomainError("average_features: schema mismatch");
    rows.push_back(&v.values);
  }
  FeatureVector out;
  out.schema_id = vectors.front().schema_id;
  average_rows(rows, out.values);
  return out;
}

void average_rows(const std::vector<const std::vector<double>*>& rows, std::vector<double>& out) {
  // Summing in a canonical row order keeps the result independent of input order.
  std::vector<const std::vector<double>*> sorted(rows);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return *a < *b; });
  const std::size_t w = rows.front()->size();
  out.assign(w, 0.0);
  for (const auto* r : sorted)
    for (std::size_t c = 0; c < w; ++c) out[c] += (*r)[c];
  const double n = static_cast<double>(rows.size());
  for (double& v : out) v /= n;
}

ExtractResult extract_one(const DataPoint& dp, BackendSet& backends, const FeatureConfig& config,
                          const ExtractOptions& options, std::size_t* clamped) {
  ExtractResult res;
  if (dp.moves.empty()) {
    res.drop_reason = "no moves";
    return res;
  }
  FeatureRecord rec;
  rec.match_id = dp.match_id;
  rec.player_id = dp.player_id;
  rec.side = dp.side;
  rec.group_index = dp.group_index;

  if (config.include_strength) {
    if (!backends.strength) throw ConfigError("strength features need a strength backend");
    std::vector<EvalQuery> q;
    for (const MoveEntry& m : dp.moves) q.push_back({EvalKind::kStrength, m.state, m.move, std::nullopt});
    const auto r = backends.strength->evaluate(q);
    std::vector<double> betas;
    for (const auto& o : r) {
      if (!o.ok()) {
        res.drop_reason = "strength: " + o.error;
        return res;
      }
      betas.push_back(*o.value);
    }
    rec.values.push_back(mean_strength(betas));
  }

  if (config.include_priors && !config.policy_levels.empty()) {
    if (!backends.policy) throw ConfigError("prior features need a policy backend");
    const std::size_t k = dp.moves.size();
    std::vector<EvalQuery> q;
    q.reserve(k * config.policy_levels.size());
    for (const auto& level : config.policy_levels)
      for (const MoveEntry& m : dp.moves) q.push_back({EvalKind::kPolicy, m.state, m.move, level});
    const auto r = backends.policy->evaluate(q);
    for (std::size_t l = 0; l < config.policy_levels.size(); ++l) {
      double acc = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const EvalOutcome& o = r[l * k + i];
        if (!o.ok()) {
          res.drop_reason = "policy: " + o.error;
          return res;
        }
        const double p = *o.value;
        if (!(p >= 0 && p <= 1)) {
          res.drop_reason = "policy: prior " + std::to_string(p) + " outside [0, 1]";
          return res;
        }
        acc += std::log(std::max(p, kPriorFloor));
      }
      rec.values.push_back(std::exp(acc / static_cast<double>(k)));
    }
  }

  if (config.include_loss && !config.loss_selected.empty()) {
    if (!backends.value) throw ConfigError("loss features need a value backend");
    std::optional<int> reach = 0;
    for (const auto& s : config.loss_selected) {
      if (!s.n_cut) {
        reach.reset();
        break;
      }
      reach = std::max(*reach, *s.n_cut);
    }
    std::vector<std::size_t> which;
    for (std::size_t i = 0; i < dp.moves.size(); ++i)
      if (options.keep_loss_traces || !reach || dp.moves[i].ply <= *reach) which.push_back(i);
    std::vector<PlyLoss> losses;
    if (!which.empty()) {
      const std::string err = compute_losses(dp, which, *backends.value, backends.game, clamped, losses);
      if (!err.empty()) {
        res.drop_reason = err;
        return res;
      }
    }
    for (const auto& s : config.loss_selected) {
      auto v = loss_stat(losses, s.stat, s.n_cut);
      if (!v) rec.flagged = true;
      rec.values.push_back(v.value_or(0.0));
    }
    if (options.keep_loss_traces) rec.losses = std::move(losses);
  }
  res.record = std::move(rec);
  return res;
}

FeatureStore extract_features(const std::vector<DataPoint>& points, BackendSet& backends,
                              const FeatureConfig& config, const ExtractOptions& options) {
  config.validate();
  if (config.include_priors && !config.policy_levels.empty()) {
    if (!backends.policy) throw ConfigError("prior features need a policy backend");
    const auto declared = backends.policy->levels();
    for (const auto& l : config.policy_levels)
      if (std::find(declared.begin(), declared.end(), l) == declared.end())
        throw ConfigError("policy backend " + backends.policy->identity() + " does not declare level '" + l + "'");
  }
  FeatureStore store;
  store.game = config.game;
  store.names = config.names();
  store.schema_id = config.schema_id();
  for (const DataPoint& dp : points) {
    ExtractResult r = extract_one(dp, backends, config, options, &store.clamped_win_rates);
    if (r.record) {
      store.records.push_back(std::move(*r.record));
    } else {
      store.drops.push_back({dp.match_id, dp.side, dp.player_id, r.drop_reason});
    }
  }
  auto by_key = [](const auto& a, const auto& b) {
    return std::tie(a.match_id, a.side) < std::tie(b.match_id, b.side);
  };
  std::stable_sort(store.records.begin(), store.records.end(), by_key);
  std::stable_sort(store.drops.begin(), store.drops.end(), by_key);
  return store;
}

std::vector<std::size_t> FeatureStore::columns_of(const std::vector<std::string>& subset) const {
  std::vector<std::size_t> cols;
  for (const auto& n : subset) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw ConfigError("feature '" + n + "' is not in the feature store");
    cols.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  return cols;
}

FeatureStore FeatureStore::project(const std::vector<std::string>& subset) const {
  if (subset.empty()) throw ConfigError("feature mask selects no columns");
  const auto cols = columns_of(subset);
  FeatureStore out;
  out.game = game;
  out.names = subset;
  out.schema_id = schema_id_of(game, subset);
  out.drops = drops;
  out.clamped_win_rates = clamped_win_rates;
  out.records.reserve(records.size());
  for (const FeatureRecord& r : records) {
    FeatureRecord p = r;
    p.values.clear();
    for (std::size_t c : cols) p.values.push_back(r.values[c]);
    out.records.push_back(std::move(p));
  }
  return out;
}

int FeatureStore::group_count() const {
  if (game == Game::kGo || game == Game::kChess) return rankforge::group_count(game);
  int g = 0;
  for (const auto& r : records) g = std::max(g, r.group_index + 1);
  return g;
}

void FeatureStore::write(std::ostream& out) const {
  json header = {{"schema",
                  {{"game", to_string(game)},
                   {"names", names},
                   {"schema_id", schema_id},
                   {"loss_sign", "deterioration = v - v' (positive = mistake)"},
                   {"clamped_win_rates", clamped_win_rates}}}};
  out << header.dump() << '\n';
  for (const FeatureRecord& r : records) {
    json j = {{"match_id", r.match_id},       {"player_id", r.player_id}, {"side", to_string(r.side)},
              {"group_index", r.group_index}, {"schema_id", schema_id},   {"features", r.values}};
    if (r.flagged) j["flagged"] = true;
    if (!r.losses.empty()) {
      json l = json::array();
      for (const PlyLoss& p : r.losses) l.push_back({p.ply, p.loss});
      j["losses"] = std::move(l);
    }
    out << j.dump() << '\n';
  }
  for (const DropEntry& d : drops) {
    json j = {{"drop",
               {{"match_id", d.match_id}, {"side", to_string(d.side)}, {"player_id", d.player_id},
                {"reason", d.reason}}}};
    out << j.dump() << '\n';
  }
}

void FeatureStore::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

FeatureStore FeatureStore::read(std::istream& in) {
  FeatureStore s;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      if (!have_header) {
        const json& h = j.at("schema");
        s.game = parse_game(h.at("game").get<std::string>());
        s.names = h.at("names").get<std::vector<std::string>>();
        s.schema_id = h.at("schema_id").get<std::string>();
        s.clamped_win_rates = h.value("clamped_win_rates", std::size_t{0});
        if (schema_id_of(s.game, s.names) != s.schema_id) throw ParseError("schema id does not match names");
        have_header = true;
        continue;
      }
      if (j.contains("drop")) {
        const json& d = j["drop"];
        s.drops.push_back({d.at("match_id").get<std::string>(), parse_side(d.at("side").get<std::string>()),
                           d.value("player_id", std::string{}), d.at("reason").get<std::string>()});
        continue;
      }
      if (j.at("schema_id").get<std::string>() != s.schema_id)
        throw ParseError("record schema " + j["schema_id"].get<std::string>() + " differs from header " + s.schema_id);
      FeatureRecord r;
      r.match_id = j.at("match_id").get<std::string>();
      r.player_id = j.at("player_id").get<std::string>();
      r.side = parse_side(j.at("side").get<std::string>());
      r.group_index = j.at("group_index").get<int>();
      r.values = j.at("features").get<std::vector<double>>();
      if (r.values.size() != s.names.size()) throw ParseError("record width differs from schema");
      r.flagged = j.value("flagged", false);
      if (j.contains("losses"))
        for (const json& p : j["losses"]) r.losses.push_back({p.at(0).get<int>(), p.at(1).get<double>()});
      s.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError("feature store line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DomainError& e) {
      throw ParseError("feature store line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("feature store has no schema header");
  return s;
}

FeatureStore FeatureStore::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read(in);
}

void FeatureStore::write_drops_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "match_id,side,player_id,reason\n";
  for (const DropEntry& d : drops) {
    std::string reason = d.reason;
    std::replace(reason.begin(), reason.end(), '"', '\'');
    out << d.match_id << ',' << to_string(d.side) << ',' << d.player_id << ",\"" << reason << "\"\n";
  }
}

}  // namespace rankforge
