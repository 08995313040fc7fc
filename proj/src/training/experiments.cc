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

#include "sscaf/training/experiments.h"

#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "sscaf/audio/mix.h"
#include "sscaf/audio/wav.h"
#include "sscaf/common/error.h"
#include "sscaf/common/kv_config.h"
#include "sscaf/common/labels.h"
#include "sscaf/common/parallel.h"
#include "sscaf/common/random.h"

namespace sscaf::training {

void WritePredictionsCsv(std::span<const std::string> clip_ids, const Predictions& predictions,
                         const std::filesystem::path& path) {
  if (predictions.annoyance.size() != clip_ids.size() ||
      predictions.probs.size() != clip_ids.size() * kNumClasses) {
    throw InputError("predictions do not match the clip list");
  }
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << "clip_id,annoyance";
  for (const auto name : kClassNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < clip_ids.size(); ++i) {
    out << clip_ids[i] << ',' << FormatDouble(predictions.annoyance[i]);
    for (int k = 0; k < kNumClasses; ++k) out << ',' << FormatDouble(predictions.probs[i * kNumClasses + k]);
    out << '\n';
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

Predictions ReadPredictionsCsv(const std::filesystem::path& path, std::span<const std::string> clip_ids) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  std::getline(in, line);
  std::string expected = "clip_id,annoyance";
  for (const auto name : kClassNames) expected += "," + std::string(name);
  if (Trim(line) != expected) throw ValidationError(fmt::format("{}: unexpected header", path.string()));
  std::map<std::string, std::vector<double>> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const auto fields = SplitString(Trim(line), ',');
    if (fields.size() != static_cast<std::size_t>(kNumClasses + 2)) {
      throw ValidationError(fmt::format("{}: row {} has {} columns", path.string(), row, fields.size()));
    }
    std::vector<double> values;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(fields[f], &used));
        if (used != fields[f].size()) throw std::invalid_argument(fields[f]);
      } catch (const std::exception&) {
        throw ValidationError(fmt::format("{}: row {} has a non-numeric value '{}'", path.string(), row, fields[f]));
      }
    }
    if (!rows.emplace(fields[0], std::move(values)).second) {
      throw ValidationError(fmt::format("{}: duplicate clip id '{}'", path.string(), fields[0]));
    }
  }
  Predictions p;
  for (const std::string& id : clip_ids) {
    const auto it = rows.find(id);
    if (it == rows.end()) throw ValidationError(fmt::format("{}: no prediction for clip '{}'", path.string(), id));
    p.annoyance.push_back(it->second[0]);
    p.probs.insert(p.probs.end(), it->second.begin() + 1, it->second.end());
  }
  return p;
}

audio::AudioClip QuantizeClip(const audio::AudioClip& clip) {
  audio::AudioClip out = clip;
  for (float& s : out.samples) s = static_cast<float>(audio::QuantizePcm16(s)) / 32768.0f;
  return out;
}

std::vector<audio::AudioClip> MixIntoClips(std::span<const audio::AudioClip> clips,
                                           std::span<const std::string> clip_ids,
                                           const std::vector<audio::AudioClip>& pool, double snr_db,
                                           uint64_t seed) {
  if (clips.size() != clip_ids.size()) throw InputError("mix: clip and id lists differ in length");
  std::vector<audio::AudioClip> out(clips.size());
  ParallelFor(clips.size(), [&](std::size_t i) {
    if (std::isinf(snr_db) && snr_db > 0) {
      out[i] = clips[i];
      return;
    }
    Rng rng(MixSeed(MixSeed(seed, "mix"), clip_ids[i]));
    const audio::MixSpec spec = audio::DrawMixSpec(pool, clips[i].duration_s(), snr_db, rng);
    out[i] = QuantizeClip(audio::MixAtSnr(clips[i], spec));
  });
  return out;
}

}  // namespace sscaf::training
