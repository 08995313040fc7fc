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

#include "sscaf/audio/resample.h"

#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::audio {

AudioClip Resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw InputError(fmt::format("resample: bad target rate {}", target_rate));
  if (clip.sample_rate <= 0) {
    throw InputError(fmt::format("resample: bad source rate {}", clip.sample_rate));
  }
  if (target_rate == clip.sample_rate) return clip;

  const std::size_t n = clip.samples.size();
  const auto out_n = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) * target_rate / static_cast<double>(clip.sample_rate)));
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(out_n);
  if (n == 0) return out;
  const double step = static_cast<double>(clip.sample_rate) / target_rate;
  for (std::size_t i = 0; i < out_n; ++i) {
    const double t = static_cast<double>(i) * step;
    const auto k = static_cast<std::size_t>(t);
    if (k + 1 >= n) {
      out.samples[i] = clip.samples[n - 1];
      continue;
    }
    const double frac = t - static_cast<double>(k);
    out.samples[i] = static_cast<float>((1.0 - frac) * clip.samples[k] + frac * clip.samples[k + 1]);
  }
  return out;
}

}  // namespace sscaf::audio
