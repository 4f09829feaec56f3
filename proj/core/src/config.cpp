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

#include "rankforge/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Strips a trailing `# comment` that is not inside a string literal.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

ConfigValue::Scalar parse_scalar(std::string_view s, int line_no) {
  s = trim(s);
  if (s.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        ++i;
        out += s[i] == 'n' ? '\n' : s[i] == 't' ? '\t' : s[i];
      } else {
        out += s[i];
      }
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  std::string buf(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != buf.size())
    throw ConfigError("config line " + std::to_string(line_no) + ": cannot parse value '" +
                      buf + "'");
  return v;
}

std::vector<std::string> split_array_items(std::string_view body, int line_no) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
    if (c == ',' && !in_string) {
      if (!trim(cur).empty()) items.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_string) throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
  if (!trim(cur).empty()) items.emplace_back(trim(cur));
  return items;
}

ConfigValue parse_value(std::string_view s, int line_no) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
    std::vector<ConfigValue::Scalar> arr;
    for (const auto& item : split_array_items(s.substr(1, s.size() - 2), line_no))
      arr.push_back(parse_scalar(item, line_no));
    return ConfigValue{arr};
  }
  return ConfigValue{parse_scalar(s, line_no)};
}

std::string render_scalar(const ConfigValue::Scalar& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  const double d = std::get<double>(v);
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

const ConfigValue::Scalar* scalar_of(const std::map<std::string, ConfigValue>& values,
                                     const std::string& key) {
  auto it = values.find(key);
  if (it == values.end()) return nullptr;
  const auto* s = std::get_if<ConfigValue::Scalar>(&it->second.value);
  if (!s) throw ConfigError("config key '" + key + "' must be a scalar");
  return s;
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = trim(strip_comment(text.substr(pos, end - pos)));
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": bad table header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set_from_string(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  std::string key(trim(std::string_view(assignment).substr(0, eq)));
  values_[key] = parse_value(std::string_view(assignment).substr(eq + 1), 0);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto* s = scalar_of(values_, key);
  if (!s) return fallback;
  if (const auto* str = std::get_if<std::string>(s)) return *str;
  throw ConfigError("config key '" + key + "' must be a string");
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto* s = scalar_of(values_, key);
  if (!s) return fallback;
  if (const auto* d = std::get_if<double>(s)) return *d;
  throw ConfigError("config key '" + key + "' must be a number");
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  if (!contains(key)) return fallback;
  const double d = get_double(key, 0);
  if (d != std::floor(d)) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<std::int64_t>(d);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* s = scalar_of(values_, key);
  if (!s) return fallback;
  if (const auto* b = std::get_if<bool>(s)) return *b;
  throw ConfigError("config key '" + key + "' must be true or false");
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto* arr = std::get_if<std::vector<ConfigValue::Scalar>>(&it->second.value);
  if (!arr) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : *arr) {
    if (const auto* s = std::get_if<std::string>(&v)) {
      out.push_back(*s);
    } else {
      throw ConfigError("config key '" + key + "' must be an array of strings");
    }
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto* arr = std::get_if<std::vector<ConfigValue::Scalar>>(&it->second.value);
  if (!arr) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : *arr) {
    if (const auto* d = std::get_if<double>(&v)) {
      out.push_back(*d);
    } else {
      throw ConfigError("config key '" + key + "' must be an array of numbers");
    }
  }
  return out;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [key, v] : values_) {
    out += key;
    out += " = ";
    if (const auto* s = std::get_if<ConfigValue::Scalar>(&v.value)) {
      out += render_scalar(*s);
    } else {
      out += "[";
      const auto& arr = std::get<std::vector<ConfigValue::Scalar>>(v.value);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i) out += ", ";
        out += render_scalar(arr[i]);
      }
      out += "]";
    }
    out += "\n";
  }
  return out;
}

std::string Config::hash() const { return hex64(fnv1a64(canonical())); }

}  // namespace rankforge
