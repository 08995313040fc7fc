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

// Helpers shared by the command-line tool and the acceptance harness:
// prediction files and the noise-insertion experiment.

#ifndef SSCAF_TRAINING_EXPERIMENTS_H_
#define SSCAF_TRAINING_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sscaf/audio/audio_clip.h"
#include "sscaf/training/trainer.h"

namespace sscaf::training {

// Header: clip_id,annoyance,<one column per class>. Values are written with
// round-trip precision.
void WritePredictionsCsv(std::span<const std::string> clip_ids, const Predictions& predictions,
                         const std::filesystem::path& path);

// Reads a predictions file, reordered to follow `clip_ids`. Throws
// ValidationError for a malformed file or a missing or duplicated id.
Predictions ReadPredictionsCsv(const std::filesystem::path& path, std::span<const std::string> clip_ids);

// Rounds every sample to 16-bit PCM resolution, so a clip equals what it
// becomes after a WAV round trip.
audio::AudioClip QuantizeClip(const audio::AudioClip& clip);

// Inserts segments drawn from `pool` into every clip at `snr_db` (kNoNoiseSnr
// leaves clips untouched). The draw for a clip depends only on (seed, clip id)
// and the pool size, so equally sized pools get identical counts and offsets.
// Results are quantized with QuantizeClip.
std::vector<audio::AudioClip> MixIntoClips(std::span<const audio::AudioClip> clips,
                                           std::span<const std::string> clip_ids,
                                           const std::vector<audio::AudioClip>& pool, double snr_db,
                                           uint64_t seed);

}  // namespace sscaf::training

#endif  // SSCAF_TRAINING_EXPERIMENTS_H_
