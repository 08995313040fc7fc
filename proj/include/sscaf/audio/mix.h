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

// Additive noise insertion at a controlled signal-to-noise ratio.

#ifndef SSCAF_AUDIO_MIX_H_
#define SSCAF_AUDIO_MIX_H_

#include <cstddef>
#include <limits>
#include <vector>

#include "sscaf/audio/audio_clip.h"
#include "sscaf/common/random.h"

namespace sscaf::audio {

// snr_db value meaning "insert nothing": the base clip is returned unchanged.
inline constexpr double kNoNoiseSnr = std::numeric_limits<double>::infinity();

inline constexpr double kNoiseSegmentSeconds = 5.0;
inline constexpr int kMaxNoiseSegments = 3;

struct MixSpec {
  std::vector<AudioClip> noise_clips;   // 1 to 3 segments
  std::vector<double> insert_offsets;   // seconds, one per segment
  double snr_db = 0.0;
};

struct MixReport {
  std::vector<double> gains;        // scale applied to each segment
  std::vector<double> base_rms;     // base RMS over each segment's region
  std::size_t clipped_samples = 0;  // output samples outside [-1, 1]
};

// Scales each segment so that 20 log10(rms(base region) / rms(scaled
// segment)) equals snr_db, then adds it at its offset. The result is not
// renormalized. Throws InputError on a spec that does not fit the base
// (count, rate, or placement) and DegenerateError for a silent segment.
AudioClip MixAtSnr(const AudioClip& base, const MixSpec& spec, MixReport* report = nullptr);

// Draws 1 to 3 segments from `pool` (with replacement) and offsets uniform in
// [0, base_seconds - segment length]. Overlapping insertions are allowed.
MixSpec DrawMixSpec(const std::vector<AudioClip>& pool, double base_seconds, double snr_db,
                    Rng& rng);

}  // namespace sscaf::audio

#endif  // SSCAF_AUDIO_MIX_H_
