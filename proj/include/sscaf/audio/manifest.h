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

// Dataset manifests: one CSV row per clip,
//   clip_id,path,annoyance,<24 label columns in canonical class order>
// with labels serialized as 0/1 and annoyance with six decimals. Relative
// paths are resolved against the manifest's directory.

#ifndef SSCAF_AUDIO_MANIFEST_H_
#define SSCAF_AUDIO_MANIFEST_H_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "sscaf/common/labels.h"

namespace sscaf::audio {

inline constexpr double kMinAnnoyance = 1.0;
inline constexpr double kMaxAnnoyance = 10.0;

struct ClipRecord {
  std::string clip_id;
  std::string path;
  std::array<bool, kNumClasses> labels{};
  double annoyance = kMinAnnoyance;

  bool operator==(const ClipRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ClipRecord> records;
  std::string split;                 // train / val / test, or free-form
  std::filesystem::path base_dir;    // for resolving relative clip paths
};

// The CSV header line (without newline).
std::string ManifestHeader();

// Throws ValidationError naming the offending row on any record that breaks
// a type invariant (annoyance range, id/path syntax, duplicate ids).
void ValidateManifest(const DatasetManifest& manifest);

// Throws IoError if unreadable and ValidationError (naming the row) on a
// wrong column count, a label outside {0,1}, or an out-of-range annoyance.
// The split is taken from the file stem.
DatasetManifest LoadManifest(const std::filesystem::path& path);

// Validates, then writes. Throws IoError if the path is not writable.
void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Absolute or base-dir-relative location of a record's audio.
std::filesystem::path ResolveClipPath(const DatasetManifest& manifest, const ClipRecord& record);

// Rounds to the six decimals the manifest stores, so in-memory records equal
// their reloaded form.
double RoundAnnoyance(double value);

}  // namespace sscaf::audio

#endif  // SSCAF_AUDIO_MANIFEST_H_
