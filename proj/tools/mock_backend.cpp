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

// Line-delimited JSON evaluator that answers from the synthetic model of a run
// configuration. Used to exercise the subprocess protocol: it can answer out
// of order, stay silent on chosen states, or report errors for them. With
// --uniform it instead answers Go and chess positions with a uniform policy
// over the legal moves, zero strength and an even value.

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rankforge/chess.hpp"
#include "rankforge/config.hpp"
#include "rankforge/error.hpp"
#include "rankforge/goboard.hpp"
#include "rankforge/pipeline.hpp"
#include "rankforge/rng.hpp"
#include "rankforge/synthlab.hpp"

namespace {

using nlohmann::json;

bool input_pending() {
  pollfd p{STDIN_FILENO, POLLIN, 0};
  return poll(&p, 1, 0) > 0 && (p.revents & POLLIN);
}

rankforge::EvalOutcome uniform_answer(const rankforge::EvalQuery& q) {
  using rankforge::EvalOutcome;
  const bool go = q.state.rfind("go19:", 0) == 0;
  switch (q.kind) {
    case rankforge::EvalKind::kStrength:
      return EvalOutcome::success(0.0);
    case rankforge::EvalKind::kValue:
      return EvalOutcome::success(go ? 0.0 : 0.5);
    case rankforge::EvalKind::kPolicy:
      break;
  }
  std::size_t legal = 0;
  if (go) {
    const auto board = rankforge::go::Board::decode(q.state);
    if (!board) return EvalOutcome::failure("bad go state");
    legal = 1;  // pass
    for (rankforge::go::Point p = 0; p < rankforge::go::kPoints; ++p) {
      rankforge::go::Board trial = *board;
      if (trial.play(p)) ++legal;
    }
  } else {
    const auto pos = rankforge::chess::Position::from_fen(q.state);
    if (!pos) return EvalOutcome::failure("bad chess state");
    legal = pos->legal_moves().size();
  }
  if (legal == 0) return EvalOutcome::failure("no legal moves");
  return EvalOutcome::success(1.0 / static_cast<double>(legal));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rankforge mock backend"};
  std::string config_path;
  std::vector<std::string> overrides;
  bool reverse = false;
  bool uniform = false;
  std::uint64_t shuffle_seed = 0;
  std::vector<std::string> hang_on;
  std::vector<std::string> error_on;
  auto* config_opt = app.add_option("--config", config_path, "Run configuration with a [synth] section");
  app.add_flag("--uniform", uniform, "Answer Go and chess positions with uniform evaluations")->excludes(config_opt);
  app.add_option("--set", overrides, "key=value override");
  app.add_flag("--reverse", reverse, "Answer each burst of requests in reverse order");
  app.add_option("--shuffle-seed", shuffle_seed, "Shuffle each burst with this seed (0 disables)");
  app.add_option("--hang-on", hang_on, "Never answer requests whose state contains this text");
  app.add_option("--error-on", error_on, "Answer with an error for states containing this text");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<rankforge::SyntheticBackend> backend;
  if (!uniform && config_path.empty()) {
    std::cerr << "mock backend: --config or --uniform is required\n";
    return 1;
  }
  if (!uniform) {
    try {
      rankforge::Config cfg = rankforge::Config::load(config_path);
      for (const auto& o : overrides) cfg.set_from_string(o);
      const rankforge::RunConfig run = rankforge::RunConfig::from_config(cfg);
      if (!run.synth) throw rankforge::ConfigError("mock backend needs a synthetic run configuration");
      backend = std::make_unique<rankforge::SyntheticBackend>(
          std::make_shared<const rankforge::SynthModel>(*run.synth));
    } catch (const std::exception& e) {
      std::cerr << "mock backend: " << e.what() << '\n';
      return 1;
    }
  }

  auto contains_any = [](const std::string& s, const std::vector<std::string>& needles) {
    return std::any_of(needles.begin(), needles.end(),
                       [&](const std::string& n) { return s.find(n) != std::string::npos; });
  };

  std::string buffer;
  std::vector<std::string> burst;
  std::uint64_t burst_count = 0;
  char chunk[65536];
  bool eof = false;
  while (!eof) {
    const ssize_t r = read(STDIN_FILENO, chunk, sizeof chunk);
    if (r <= 0) {
      eof = true;
    } else {
      buffer.append(chunk, static_cast<std::size_t>(r));
    }
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      const std::string line = buffer.substr(start, nl - start);
      if (line.empty()) continue;
      json req;
      try {
        req = json::parse(line);
      } catch (const json::exception&) {
        continue;
      }
      const std::int64_t id = req.value("id", std::int64_t{-1});
      rankforge::EvalQuery q;
      json resp = {{"id", id}};
      try {
        q.kind = rankforge::parse_eval_kind(req.at("kind").get<std::string>());
        q.state = req.at("state").get<std::string>();
        if (req.contains("move") && req["move"].is_string()) q.move = req["move"].get<std::string>();
        if (req.contains("level") && req["level"].is_string()) q.level = req["level"].get<std::string>();
      } catch (const std::exception& e) {
        resp["error"] = std::string("bad request: ") + e.what();
        burst.push_back(resp.dump());
        continue;
      }
      if (contains_any(q.state, hang_on)) continue;
      if (contains_any(q.state, error_on)) {
        resp["error"] = "refused state " + q.state;
      } else {
        const rankforge::EvalOutcome o = uniform ? uniform_answer(q) : backend->answer(q);
        if (o.ok()) {
          resp["value"] = *o.value;
        } else {
          resp["error"] = o.error;
        }
      }
      burst.push_back(resp.dump());
    }
    buffer.erase(0, start);

    if (!burst.empty() && (eof || !input_pending())) {
      if (reverse) std::reverse(burst.begin(), burst.end());
      if (shuffle_seed != 0) {
        rankforge::Rng rng(rankforge::derive_seed(shuffle_seed, "mock-burst", {burst_count}));
        std::shuffle(burst.begin(), burst.end(), rng);
      }
      ++burst_count;
      for (const auto& s : burst) {
        std::fwrite(s.data(), 1, s.size(), stdout);
        std::fputc('\n', stdout);
      }
      std::fflush(stdout);
      burst.clear();
    }
  }
  return 0;
}
