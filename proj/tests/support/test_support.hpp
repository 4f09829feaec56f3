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

// Helpers shared by the unit tests and the acceptance binary: fixture access,
// scratch directories and brute-force oracles that do not reuse library code.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rankforge::testing {

inline std::string fixture_path(const std::string& rel) {
  return std::string(RANKFORGE_FIXTURE_DIR) + "/" + rel;
}

inline std::string config_path(const std::string& name) {
  return std::string(RANKFORGE_CONFIG_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline nlohmann::json read_json(const std::string& path) { return nlohmann::json::parse(read_text(path)); }

// Sorted list of files with the given extension directly inside `dir`.
inline std::vector<std::filesystem::path> list_files(const std::string& dir, const std::string& ext) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      path_ = base / ("rankforge-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(i));
      if (std::filesystem::create_directories(path_)) break;
    }
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Neumaier-compensated sum.
inline double compensated_sum(const std::vector<double>& v) {
  double sum = 0, c = 0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

struct BruteSplit {
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

// Exhaustive split search: every feature, every threshold between two
// adjacent distinct sorted values, sums recomputed from scratch per candidate.
// Ties keep the first candidate in (feature, threshold) order.
inline std::optional<BruteSplit> exhaustive_split(const std::vector<std::vector<double>>& x,
                                                  const std::vector<double>& y, int min_leaf) {
  const std::size_t n = y.size();
  double total = 0;
  for (double v : y) total += v;
  std::optional<BruteSplit> best;
  const std::size_t d = x.empty() ? 0 : x[0].size();
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<double> values;
    for (const auto& row : x) values.push_back(row[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double thr = values[k] + (values[k + 1] - values[k]) / 2;
      if (!(thr < values[k + 1])) thr = values[k];
      double sl = 0, sr = 0;
      std::size_t nl = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i][f] <= thr) {
          sl += y[i];
          ++nl;
        } else {
          sr += y[i];
        }
      }
      const std::size_t nr = n - nl;
      if (nl < static_cast<std::size_t>(min_leaf) || nr < static_cast<std::size_t>(min_leaf)) continue;
      const double gain = sl * sl / nl + sr * sr / nr - total * total / n;
      if (gain > 0 && (!best || gain > best->gain)) best = BruteSplit{static_cast<int>(f), thr, gain};
    }
  }
  return best;
}

}  // namespace rankforge::testing
