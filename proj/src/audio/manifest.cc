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

#include "sscaf/audio/manifest.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "sscaf/common/error.h"
#include "sscaf/common/kv_config.h"

namespace sscaf::audio {

namespace {

constexpr int kFixedColumns = 3;

std::string RowName(std::size_t row, const std::string& clip_id) {
  return clip_id.empty() ? fmt::format("row {}", row) : fmt::format("row {} ({})", row, clip_id);
}

void CheckRecord(const ClipRecord& r, std::size_t row) {
  const auto bad_text = [](const std::string& s) {
    return s.find_first_of(",\n\r\"") != std::string::npos;
  };
  if (r.clip_id.empty() || bad_text(r.clip_id)) {
    throw ValidationError(fmt::format("manifest {}: clip_id must be non-empty without commas, quotes or newlines",
                                      RowName(row, r.clip_id)));
  }
  if (r.path.empty() || bad_text(r.path)) {
    throw ValidationError(fmt::format("manifest {}: path must be non-empty without commas, quotes or newlines",
                                      RowName(row, r.clip_id)));
  }
  if (!(r.annoyance >= kMinAnnoyance && r.annoyance <= kMaxAnnoyance)) {
    throw ValidationError(fmt::format("manifest {}: annoyance {} outside [{}, {}]",
                                      RowName(row, r.clip_id), r.annoyance, kMinAnnoyance,
                                      kMaxAnnoyance));
  }
}

}  // namespace

std::string ManifestHeader() {
  std::string h = "clip_id,path,annoyance";
  for (const auto name : kClassNames) {
    h += ',';
    h += name;
  }
  return h;
}

double RoundAnnoyance(double value) { return std::round(value * 1e6) / 1e6; }

void ValidateManifest(const DatasetManifest& manifest) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    CheckRecord(r, i + 1);
    if (!seen.insert(r.clip_id).second) {
      throw ValidationError(fmt::format("manifest {}: duplicate clip_id", RowName(i + 1, r.clip_id)));
    }
  }
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open manifest {}", path.string()));
  DatasetManifest manifest;
  manifest.split = path.stem().string();
  manifest.base_dir = path.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw ValidationError(fmt::format("manifest {}: missing header", path.string()));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != ManifestHeader()) {
    throw ValidationError(fmt::format("manifest {}: unexpected header '{}'", path.string(), line));
  }
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cols = SplitString(line, ',');
    const std::string id = cols.empty() ? std::string() : cols[0];
    if (cols.size() != static_cast<std::size_t>(kFixedColumns + kNumClasses)) {
      throw ValidationError(fmt::format("manifest {}: {} columns, expected {}", RowName(row, id),
                                        cols.size(), kFixedColumns + kNumClasses));
    }
    ClipRecord r;
    r.clip_id = cols[0];
    r.path = cols[1];
    const std::string& a = cols[2];
    double annoyance = 0.0;
    const auto [end, ec] = std::from_chars(a.data(), a.data() + a.size(), annoyance);
    if (ec != std::errc() || end != a.data() + a.size()) {
      throw ValidationError(fmt::format("manifest {}: annoyance '{}' is not a number", RowName(row, id), a));
    }
    r.annoyance = annoyance;
    for (int c = 0; c < kNumClasses; ++c) {
      const std::string& v = cols[kFixedColumns + c];
      if (v != "0" && v != "1") {
        throw ValidationError(fmt::format("manifest {}: label {} is '{}', expected 0 or 1",
                                          RowName(row, id), kClassNames[c], v));
      }
      r.labels[c] = v == "1";
    }
    CheckRecord(r, row);
    manifest.records.push_back(std::move(r));
  }
  ValidateManifest(manifest);
  return manifest;
}

void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  ValidateManifest(manifest);
  std::ostringstream out;
  out << ManifestHeader() << '\n';
  for (const auto& r : manifest.records) {
    out << r.clip_id << ',' << r.path << ',' << fmt::format("{:.6f}", r.annoyance);
    for (const bool l : r.labels) out << (l ? ",1" : ",0");
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  file << out.str();
  if (!file) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::filesystem::path ResolveClipPath(const DatasetManifest& manifest, const ClipRecord& record) {
  const std::filesystem::path p(record.path);
  return p.is_absolute() ? p : manifest.base_dir / p;
}

}  // namespace sscaf::audio
