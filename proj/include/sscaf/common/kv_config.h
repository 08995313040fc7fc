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

#ifndef SSCAF_COMMON_KV_CONFIG_H_
#define SSCAF_COMMON_KV_CONFIG_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sscaf {

// Plain `key = value` text. Blank lines and lines starting with '#' are
// ignored; keys are unique and order-insensitive. Serialization is sorted by
// key so identical maps produce identical bytes.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(const std::string& text);
  static KeyValueConfig Load(const std::filesystem::path& path);

  void Save(const std::filesystem::path& path) const;
  std::string ToString() const;

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  void Set(const std::string& key, const std::string& value);
  void Set(const std::string& key, double value);
  void Set(const std::string& key, int value);

  // Typed getters throw ConfigError naming the key on a malformed value.
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  int GetInt(const std::string& key, int fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  std::vector<std::string> GetList(const std::string& key,
                                   const std::vector<std::string>& fallback) const;

  // Throws ConfigError if the key is missing.
  const std::string& Require(const std::string& key) const;

  // Overlays every entry of `other` onto this config.
  void Merge(const KeyValueConfig& other);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

std::vector<std::string> SplitString(const std::string& text, char sep);
std::string Trim(const std::string& text);

}  // namespace sscaf

#endif  // SSCAF_COMMON_KV_CONFIG_H_
