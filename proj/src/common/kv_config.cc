// Copyright 2026 The sscaf Authors
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

#include "sscaf/common/kv_config.h"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf {

std::string Trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitString(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

std::string FormatDouble(double value) { return fmt::format("{}", value); }

KeyValueConfig KeyValueConfig::Parse(const std::string& text) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    }
    const std::string key = Trim(trimmed.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(fmt::format("config line {}: empty key", line_no));
    }
    if (config.Has(key)) {
      throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
    }
    config.values_[key] = Trim(trimmed.substr(eq + 1));
  }
  return config;
}

KeyValueConfig KeyValueConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

void KeyValueConfig::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write config file {}", path.string()));
  out << ToString();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string KeyValueConfig::ToString() const {
  std::string text;
  for (const auto& [key, value] : values_) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  return text;
}

void KeyValueConfig::Set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::Set(const std::string& key, double value) {
  values_[key] = FormatDouble(value);
}

void KeyValueConfig::Set(const std::string& key, int value) {
  values_[key] = std::to_string(value);
}

std::string KeyValueConfig::GetString(const std::string& key,
                                      const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not a number", key, s));
  }
  return value;
}

int KeyValueConfig::GetInt(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not an integer", key, s));
  }
  return value;
}

bool KeyValueConfig::GetBool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw ConfigError(fmt::format("config key '{}': '{}' is not a boolean", key, s));
}

std::vector<std::string> KeyValueConfig::GetList(
    const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::string> items;
  for (const auto& part : SplitString(it->second, ',')) {
    const std::string item = Trim(part);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

const std::string& KeyValueConfig::Require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(fmt::format("missing required config key '{}'", key));
  }
  return it->second;
}

void KeyValueConfig::Merge(const KeyValueConfig& other) {
  for (const auto& [key, value] : other.values_) values_[key] = value;
}

}  // namespace sscaf
