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

#include "rankforge/synthlab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

void SynthConfig::validate() const {
  if (groups < 2) throw ConfigError("synth.groups must be at least 2");
  if (moves_per_state < 2) throw ConfigError("synth.moves_per_state must be at least 2");
  if (plies_per_match < 2) throw ConfigError("synth.plies_per_match must be at least 2");
  if (!(lambda1 >= 0)) throw ConfigError("synth.lambda1 must be non-negative");
  if (!(perception_width > 0)) throw ConfigError("synth.perception_width must be positive");
  if (!(perception_sd >= 0) || !(player_offset_sd >= 0))
    throw ConfigError("synth noise scales must be non-negative");
  if (players_per_group == 1 || players_per_group < 0)
    throw ConfigError("synth.players_per_group must be 0 or at least 2");
  double lo = 0;
  for (double s : levels()) lo = std::min(lo, s);
  if (!(lambda0 + lambda1 * lo > 0)) throw ConfigError("inverse temperature must stay positive");
  for (double s : level_skills)
    if (!std::isfinite(s)) throw ConfigError("synth.levels must be finite");
}

std::vector<double> SynthConfig::levels() const {
  if (!level_skills.empty()) return level_skills;
  std::vector<double> out;
  for (int j = 0; j < groups; ++j) out.push_back(j);
  return out;
}

std::vector<std::string> SynthConfig::level_labels() const {
  std::vector<std::string> out;
  for (double s : levels()) out.push_back(skill_label(s));
  return out;
}

SynthConfig SynthConfig::from_config(const Config& c, const std::string& p) {
  SynthConfig s;
  s.groups = static_cast<int>(c.get_int(p + "groups", s.groups));
  s.moves_per_state = static_cast<int>(c.get_int(p + "moves_per_state", s.moves_per_state));
  s.plies_per_match = static_cast<int>(c.get_int(p + "plies_per_match", s.plies_per_match));
  s.lambda0 = c.get_double(p + "lambda0", s.lambda0);
  s.lambda1 = c.get_double(p + "lambda1", s.lambda1);
  s.perception_sd = c.get_double(p + "perception_sd", s.perception_sd);
  s.perception_decay = c.get_double(p + "perception_decay", s.perception_decay);
  s.perception_width = c.get_double(p + "perception_width", s.perception_width);
  s.player_offset_sd = c.get_double(p + "player_offset_sd", s.player_offset_sd);
  s.players_per_group = static_cast<int>(c.get_int(p + "players_per_group", s.players_per_group));
  s.level_skills = c.get_doubles(p + "levels", {});
  s.seed = static_cast<std::uint64_t>(c.get_int(p + "seed", static_cast<std::int64_t>(s.seed)));
  s.validate();
  return s;
}

std::string SynthConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "groups=" << groups << ";moves=" << moves_per_state << ";plies=" << plies_per_match
     << ";lambda0=" << lambda0 << ";lambda1=" << lambda1 << ";psd=" << perception_sd
     << ";pdecay=" << perception_decay << ";pwidth=" << perception_width << ";offset=" << player_offset_sd
     << ";players=" << players_per_group << ";seed=" << seed << ";levels=";
  for (double s : levels()) os << s << ',';
  return os.str();
}

std::string skill_label(double skill) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, skill);
  return std::string(buf, end);
}

double parse_skill_label(const std::string& label) {
  double v = 0;
  auto [end, ec] = std::from_chars(label.data(), label.data() + label.size(), v);
  if (ec != std::errc() || end != label.data() + label.size() || !std::isfinite(v))
    throw DomainError("synthetic level label '" + label + "' is not a skill value");
  return v;
}

std::vector<double> log_softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double v : z) sum += std::exp(v - m);
  const double lse = m + std::log(sum);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
  return out;
}

std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> out(z.size());
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += out[i] = std::exp(z[i] - m);
  for (double& v : out) v /= sum;
  return out;
}

SynthModel::SynthModel(SynthConfig config) : config_(std::move(config)) { config_.validate(); }

SynthModel::StateDraws SynthModel::draws(std::uint64_t key) const {
  const int m = config_.moves_per_state;
  const int r = config_.groups;
  StateDraws d;
  d.quality.resize(m);
  d.noise.resize(static_cast<std::size_t>(m) * r);
  for (int a = 0; a < m; ++a) d.quality[a] = normal_at(key, a);
  if (config_.perception_sd > 0)
    for (int i = 0; i < m * r; ++i) d.noise[i] = normal_at(key, m + i);
  return d;
}

double SynthModel::inverse_temperature(double skill) const { return config_.lambda0 + config_.lambda1 * skill; }

double SynthModel::noise_scale(double skill) const {
  return config_.perception_sd * std::exp(-config_.perception_decay * skill);
}

std::vector<double> SynthModel::logits(const StateDraws& d, double skill) const {
  const int m = config_.moves_per_state;
  const int r = config_.groups;
  const double lambda = inverse_temperature(skill);
  std::vector<double> z(d.quality);
  const double sigma = noise_scale(skill);
  if (sigma > 0) {
    std::vector<double> w(r);
    double norm = 0;
    const double h = config_.perception_width;
    for (int k = 0; k < r; ++k) {
      const double t = skill - k;
      w[k] = std::exp(-t * t / (2 * h * h));
      norm += w[k] * w[k];
    }
    norm = std::sqrt(norm);
    for (int a = 0; a < m; ++a) {
      double eps = 0;
      for (int k = 0; k < r; ++k) eps += w[k] * d.noise[static_cast<std::size_t>(a) * r + k];
      z[a] += sigma * eps / norm;
    }
  }
  for (double& v : z) v *= lambda;
  return z;
}

int SynthModel::choose(const StateDraws& d, double skill, double u) const {
  const std::vector<double> p = policy(d, skill);
  double acc = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(p.size()) - 1;
}

std::string SynthModel::state_name(std::uint64_t key) { return "syn:" + hex64(key); }
std::string SynthModel::move_name(int index) { return "m" + std::to_string(index); }

namespace {

struct PlayerSlot {
  std::string id;
  double skill;
};

PlayerSlot player_for(const SynthConfig& c, int group, std::uint64_t index, int side, const std::string& tag) {
  const std::string base = tag + "-g" + std::to_string(group);
  if (c.players_per_group > 0) {
    const std::uint64_t p_count = static_cast<std::uint64_t>(c.players_per_group);
    const std::uint64_t black = index % p_count;
    const std::uint64_t p = side == 0 ? black : (black + 1 + (index / p_count) % (p_count - 1)) % p_count;
    const double off = c.player_offset_sd > 0
                           ? c.player_offset_sd * normal_at(derive_seed(c.seed, "player:" + tag, {std::uint64_t(group)}), p)
                           : 0.0;
    return {base + "-p" + std::to_string(p), group + off};
  }
  const double off =
      c.player_offset_sd > 0
          ? c.player_offset_sd * normal_at(derive_seed(c.seed, "offset:" + tag, {std::uint64_t(group), index}), side)
          : 0.0;
  return {base + "-m" + std::to_string(index) + (side == 0 ? ":black" : ":white"), group + off};
}

}  // namespace

SynthMatch gen_match(const SynthModel& model, int group, std::uint64_t index, const std::string& tag) {
  const SynthConfig& c = model.config();
  if (group < 0 || group >= c.groups) throw OutOfRangeError("synthetic group " + std::to_string(group));
  SynthMatch m;
  m.match_id = tag + "-g" + std::to_string(group) + "-m" + std::to_string(index);
  m.true_group = group;
  const PlayerSlot b = player_for(c, group, index, 0, tag);
  const PlayerSlot w = player_for(c, group, index, 1, tag);
  m.black_player = b.id;
  m.white_player = w.id;
  m.black_skill = b.skill;
  m.white_skill = w.skill;
  const std::uint64_t g = static_cast<std::uint64_t>(group);
  const std::uint64_t choice_key = derive_seed(c.seed, "choice:" + tag, {g, index});
  m.plies.reserve(c.plies_per_match);
  for (int ply = 1; ply <= c.plies_per_match; ++ply) {
    const std::uint64_t key = derive_seed(c.seed, "state:" + tag, {g, index, std::uint64_t(ply)});
    const auto d = model.draws(key);
    const double skill = ply % 2 == 1 ? m.black_skill : m.white_skill;
    const int a = model.choose(d, skill, uniform01_at(choice_key, ply));
    m.plies.push_back({SynthModel::state_name(key), a, d.quality[a]});
  }
  return m;
}

std::pair<DataPoint, DataPoint> match_datapoints(const SynthMatch& match) {
  DataPoint black, white;
  for (DataPoint* dp : {&black, &white}) {
    dp->match_id = match.match_id;
    dp->game = Game::kSynthetic;
    dp->group_index = match.true_group;
  }
  black.side = Side::kBlack;
  white.side = Side::kWhite;
  black.player_id = match.black_player;
  white.player_id = match.white_player;
  for (std::size_t i = 0; i < match.plies.size(); ++i) {
    const int ply = static_cast<int>(i) + 1;
    DataPoint& dp = ply % 2 == 1 ? black : white;
    dp.moves.push_back({ply, match.plies[i].state, SynthModel::move_name(match.plies[i].move)});
  }
  return {std::move(black), std::move(white)};
}

std::vector<DataPoint> synth_datapoints(const SynthModel& model, int matches_per_group, const std::string& tag) {
  std::vector<DataPoint> out;
  out.reserve(static_cast<std::size_t>(model.config().groups) * matches_per_group * 2);
  for (int j = 0; j < model.config().groups; ++j) {
    for (int i = 0; i < matches_per_group; ++i) {
      auto [b, w] = match_datapoints(gen_match(model, j, static_cast<std::uint64_t>(i), tag));
      out.push_back(std::move(b));
      out.push_back(std::move(w));
    }
  }
  return out;
}

SyntheticBackend::SyntheticBackend(std::shared_ptr<const SynthModel> model) : model_(std::move(model)) {
  identity_ = "builtin:synthetic:" + hex64(fnv1a64(model_->config().canonical()));
}

std::string SyntheticBackend::identity() const { return identity_; }

std::vector<std::string> SyntheticBackend::levels() const { return model_->config().level_labels(); }

namespace {

struct ParsedState {
  std::uint64_t key = 0;
  int successor_move = -1;  // >= 0 for "<state>/mK"
};

bool parse_move(std::string_view s, int m, int& out) {
  if (s.size() < 2 || s[0] != 'm') return false;
  auto [end, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), out);
  return ec == std::errc() && end == s.data() + s.size() && out >= 0 && out < m;
}

bool parse_state(std::string_view s, int m, ParsedState& out) {
  if (s.substr(0, 4) != "syn:" || s.size() < 20) return false;
  auto [end, ec] = std::from_chars(s.data() + 4, s.data() + 20, out.key, 16);
  if (ec != std::errc() || end != s.data() + 20) return false;
  if (s.size() == 20) return true;
  if (s[20] != '/') return false;
  return parse_move(s.substr(21), m, out.successor_move);
}

}  // namespace

namespace {

// Answer for a parsed query given the state's draws; `policy_of` returns the
// softmax for a skill.
template <typename PolicyOf>
EvalOutcome respond(const EvalQuery& q, const ParsedState& st, const SynthModel::StateDraws& d, int m,
                    PolicyOf&& policy_of) {
  if (q.kind == EvalKind::kValue) {
    if (st.successor_move >= 0) return EvalOutcome::success(-d.quality[st.successor_move]);
    return EvalOutcome::success(*std::max_element(d.quality.begin(), d.quality.end()));
  }
  if (st.successor_move >= 0) return EvalOutcome::failure("moves are only defined at base states");
  int a = -1;
  if (!q.move || !parse_move(*q.move, m, a)) return EvalOutcome::failure("illegal synthetic move");
  if (q.kind == EvalKind::kStrength) return EvalOutcome::success(d.quality[a]);
  if (!q.level) return EvalOutcome::failure("policy query without level");
  double skill = 0;
  try {
    skill = parse_skill_label(*q.level);
  } catch (const DomainError& e) {
    return EvalOutcome::failure(e.what());
  }
  return EvalOutcome::success(policy_of(*q.level, skill)[a]);
}

}  // namespace

EvalOutcome SyntheticBackend::answer(const EvalQuery& q) const {
  const int m = model_->config().moves_per_state;
  if (q.kind == EvalKind::kValue) {
    if (auto it = value_table_.find(q.state); it != value_table_.end()) return EvalOutcome::success(it->second);
  }
  ParsedState st;
  if (!parse_state(q.state, m, st)) return EvalOutcome::failure("unknown synthetic state '" + q.state + "'");
  const auto d = model_->draws(st.key);
  return respond(q, st, d, m, [&](const std::string&, double skill) { return model_->policy(d, skill); });
}

std::vector<EvalOutcome> SyntheticBackend::evaluate(const std::vector<EvalQuery>& queries) {
  // Draws per state and softmaxes per (state, level) are shared within a batch.
  std::unordered_map<std::uint64_t, SynthModel::StateDraws> draws;
  std::map<std::pair<std::uint64_t, std::string>, std::vector<double>> policies;
  std::vector<EvalOutcome> out;
  out.reserve(queries.size());
  const int m = model_->config().moves_per_state;
  for (const EvalQuery& q : queries) {
    if (q.kind == EvalKind::kValue) {
      if (auto it = value_table_.find(q.state); it != value_table_.end()) {
        out.push_back(EvalOutcome::success(it->second));
        continue;
      }
    }
    ParsedState st;
    if (!parse_state(q.state, m, st)) {
      out.push_back(EvalOutcome::failure("unknown synthetic state '" + q.state + "'"));
      continue;
    }
    auto it = draws.find(st.key);
    if (it == draws.end()) it = draws.emplace(st.key, model_->draws(st.key)).first;
    const SynthModel::StateDraws& d = it->second;
    out.push_back(respond(q, st, d, m, [&](const std::string& level, double skill) -> const std::vector<double>& {
      auto p = policies.find({st.key, level});
      if (p == policies.end()) p = policies.emplace(std::pair{st.key, level}, model_->policy(d, skill)).first;
      return p->second;
    }));
  }
  return out;
}

OracleResult bayes_oracle_accuracy(const SynthModel& model, int n, int trials, std::uint64_t seed) {
  const SynthConfig& c = model.config();
  if (n < 1 || trials < 1) throw DomainError("oracle needs n >= 1 and trials >= 1");
  OracleResult res;
  res.trials = trials;
  int hits = 0;
  int hits1 = 0;
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ut = static_cast<std::uint64_t>(t);
    Rng rng(derive_seed(seed, "oracle-group", {un, ut}));
    const int group = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.groups)));
    std::vector<double> loglik(c.groups, 0.0);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t ui = static_cast<std::uint64_t>(i);
      const int moves = i % 2 == 0 ? (c.plies_per_match + 1) / 2 : c.plies_per_match / 2;
      const double skill =
          group + (c.player_offset_sd > 0
                       ? c.player_offset_sd * normal_at(derive_seed(seed, "oracle-offset", {un, ut}), ui)
                       : 0.0);
      const std::uint64_t choice_key = derive_seed(seed, "oracle-choice", {un, ut, ui});
      for (int k = 0; k < moves; ++k) {
        const std::uint64_t uk = static_cast<std::uint64_t>(k);
        const auto d = model.draws(derive_seed(seed, "oracle-state", {un, ut, ui, uk}));
        const int a = model.choose(d, skill, uniform01_at(choice_key, uk));
        for (int g = 0; g < c.groups; ++g) loglik[g] += log_softmax(model.logits(d, g))[a];
      }
    }
    const int guess = static_cast<int>(std::max_element(loglik.begin(), loglik.end()) - loglik.begin());
    hits += guess == group;
    hits1 += std::abs(guess - group) <= 1;
  }
  res.accuracy = static_cast<double>(hits) / trials;
  res.accuracy_pm1 = static_cast<double>(hits1) / trials;
  return res;
}

}  // namespace rankforge
