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

#ifndef SSCAF_AUDIO_AUDIO_CLIP_H_
#define SSCAF_AUDIO_AUDIO_CLIP_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sscaf/common/labels.h"

namespace sscaf::audio {

// Mono sample buffer. Stereo sources are downmixed on load, so every clip in
// the pipeline is single-channel.
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = kCanonicalSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

// Root mean square of a sample range; 0 for an empty range.
inline double Rms(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (const float v : x) acc += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

// Number of samples in `seconds` at `sample_rate`, rounded to nearest.
inline std::size_t SecondsToSamples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * static_cast<double>(sample_rate)));
}

}  // namespace sscaf::audio

#endif  // SSCAF_AUDIO_AUDIO_CLIP_H_
