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

#include "rankforge/backends.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "rankforge/error.hpp"

namespace rankforge {

using nlohmann::json;

std::string to_string(EvalKind k) {
  switch (k) {
    case EvalKind::kStrength: return "strength";
    case EvalKind::kPolicy: return "policy";
    case EvalKind::kValue: return "value";
  }
  return "?";
}

EvalKind parse_eval_kind(std::string_view s) {
  if (s == "strength") return EvalKind::kStrength;
  if (s == "policy") return EvalKind::kPolicy;
  if (s == "value") return EvalKind::kValue;
  throw DomainError("unknown evaluation kind '" + std::string(s) + "'");
}

double Backend::evaluate_one(const EvalQuery& query) {
  auto out = evaluate({query});
  if (out.size() != 1) throw BackendError("backend returned " + std::to_string(out.size()) + " outcomes for 1 query");
  if (!out[0].ok()) throw BackendError(out[0].error);
  return *out[0].value;
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  {
    std::ifstream in(path_);
    std::string line;
    std::size_t lineno = 0;
    while (in && std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        json j = json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("value").get<double>();
      } catch (const json::exception&) {
        // A torn final line from an interrupted run is skipped.
        continue;
      }
    }
  }
  out_ = std::make_unique<std::ofstream>(path_, std::ios::app);
  if (!*out_) throw ConfigError("cannot open response cache " + path_);
}

std::string ResponseCache::key(const std::string& identity, const EvalQuery& q) {
  json j = json::array({identity, to_string(q.kind), q.state, q.move ? json(*q.move) : json(nullptr),
                        q.level ? json(*q.level) : json(nullptr)});
  return j.dump();
}

std::optional<double> ResponseCache::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, double value) {
  auto [it, inserted] = entries_.emplace(key, value);
  if (!inserted) return;
  if (out_) *out_ << json{{"key", key}, {"value", value}}.dump() << '\n' << std::flush;
}

CachedBackend::CachedBackend(std::shared_ptr<Backend> inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<EvalOutcome> CachedBackend::evaluate(const std::vector<EvalQuery>& queries) {
  std::vector<EvalOutcome> out(queries.size());
  std::vector<std::string> keys(queries.size());
  std::vector<EvalQuery> missing;
  std::vector<std::size_t> missing_at;
  const std::string id = inner_->identity();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    keys[i] = ResponseCache::key(id, queries[i]);
    if (auto v = cache_->get(keys[i])) {
      out[i] = EvalOutcome::success(*v);
      ++hits_;
    } else {
      missing.push_back(queries[i]);
      missing_at.push_back(i);
    }
  }
  if (!missing.empty()) {
    misses_ += missing.size();
    auto fresh = inner_->evaluate(missing);
    for (std::size_t m = 0; m < missing.size(); ++m) {
      out[missing_at[m]] = fresh[m];
      if (fresh[m].ok()) cache_->put(keys[missing_at[m]], *fresh[m].value);
    }
  }
  return out;
}

std::string request_to_json(std::int64_t id, const EvalQuery& q) {
  json j = {{"id", id},
            {"kind", to_string(q.kind)},
            {"state", q.state},
            {"move", q.move ? json(*q.move) : json(nullptr)},
            {"level", q.level ? json(*q.level) : json(nullptr)}};
  return j.dump();
}

std::pair<std::int64_t, EvalOutcome> response_from_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed response: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer())
    throw ParseError("response without integer id: " + line);
  const std::int64_t id = j["id"].get<std::int64_t>();
  if (j.contains("value") && j["value"].is_number()) {
    const double v = j["value"].get<double>();
    if (!std::isfinite(v)) return {id, EvalOutcome::failure("non-finite value")};
    return {id, EvalOutcome::success(v)};
  }
  if (j.contains("error")) {
    const json& e = j["error"];
    return {id, EvalOutcome::failure(e.is_string() ? e.get<std::string>() : e.dump())};
  }
  throw ParseError("response has neither value nor error: " + line);
}

double logit_counted(double wr, std::size_t& clamped) {
  double c = wr;
  if (!(c >= kWinRateEpsilon)) c = kWinRateEpsilon;
  if (c > 1.0 - kWinRateEpsilon) c = 1.0 - kWinRateEpsilon;
  if (c != wr) ++clamped;
  return std::log(c / (1.0 - c));
}

double logit(double wr) {
  std::size_t ignored = 0;
  return logit_counted(wr, ignored);
}

double score_strength(Backend& b, const std::string& state, const std::string& move) {
  return b.evaluate_one({EvalKind::kStrength, state, move, std::nullopt});
}

double policy_prior(Backend& b, const std::string& state, const std::string& move, const std::string& level) {
  const auto lv = b.levels();
  if (std::find(lv.begin(), lv.end(), level) == lv.end())
    throw ConfigError("backend " + b.identity() + " has no policy level '" + level + "'");
  return b.evaluate_one({EvalKind::kPolicy, state, move, level});
}

double evaluate_state(Backend& b, const std::string& state) {
  return b.evaluate_one({EvalKind::kValue, state, std::nullopt, std::nullopt});
}

}  // namespace rankforge
