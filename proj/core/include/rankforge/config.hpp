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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rankforge {

// Values of the TOML subset accepted by the config reader: strings, numbers,
// booleans and flat arrays of those.
struct ConfigValue {
  using Scalar = std::variant<std::string, double, bool>;
  std::variant<Scalar, std::vector<Scalar>> value;
};

// Flat key -> value map; keys inside `[section]` tables are stored dotted,
// e.g. `synth.groups`.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }
  // Applies a `key=value` override using the same value syntax as the file.
  void set_from_string(const std::string& assignment);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  const std::map<std::string, ConfigValue>& values() const { return values_; }

  // Canonical `key = value` rendering, stable across runs; hashed into manifests.
  std::string canonical() const;
  std::string hash() const;

 private:
  std::map<std::string, ConfigValue> values_;
};

}  // namespace rankforge
