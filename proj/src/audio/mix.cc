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

#include "sscaf/audio/mix.h"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sscaf/common/error.h"

namespace sscaf::audio {

AudioClip MixAtSnr(const AudioClip& base, const MixSpec& spec, MixReport* report) {
  if (report != nullptr) *report = MixReport{};
  if (std::isinf(spec.snr_db) && spec.snr_db > 0) return base;
  if (!std::isfinite(spec.snr_db)) throw InputError("mix: snr_db must be finite or +inf");

  const std::size_t count = spec.noise_clips.size();
  if (count < 1 || count > kMaxNoiseSegments) {
    throw InputError(fmt::format("mix: {} noise segments, expected 1 to {}", count, kMaxNoiseSegments));
  }
  if (spec.insert_offsets.size() != count) {
    throw InputError(fmt::format("mix: {} offsets for {} segments", spec.insert_offsets.size(), count));
  }

  AudioClip out = base;
  const double noise_factor = std::pow(10.0, spec.snr_db / 20.0);
  for (std::size_t s = 0; s < count; ++s) {
    const AudioClip& noise = spec.noise_clips[s];
    if (noise.sample_rate != base.sample_rate) {
      throw InputError(fmt::format("mix: segment {} at {} Hz, base at {} Hz", s, noise.sample_rate,
                                   base.sample_rate));
    }
    const double offset = spec.insert_offsets[s];
    if (!(offset >= 0.0)) throw InputError(fmt::format("mix: negative offset {} s", offset));
    const std::size_t start = SecondsToSamples(offset, base.sample_rate);
    const std::size_t len = noise.samples.size();
    if (len == 0 || start + len > base.samples.size()) {
      throw InputError(fmt::format("mix: segment {} ({} samples at {} s) does not fit a {}-sample base",
                                   s, len, offset, base.samples.size()));
    }
    const double noise_rms = Rms(noise.samples);
    if (noise_rms == 0.0) throw DegenerateError(fmt::format("mix: noise segment {} is silent", s));
    // The target is measured against the unmixed base so overlapping
    // insertions do not influence one another's scale.
    const double base_rms =
        Rms(std::span<const float>(base.samples).subspan(start, len));
    const double gain = base_rms / (noise_rms * noise_factor);
    for (std::size_t i = 0; i < len; ++i) {
      out.samples[start + i] =
          static_cast<float>(out.samples[start + i] + gain * static_cast<double>(noise.samples[i]));
    }
    if (report != nullptr) {
      report->gains.push_back(gain);
      report->base_rms.push_back(base_rms);
    }
  }
  std::size_t clipped = 0;
  for (const float v : out.samples) clipped += (v > 1.0f || v < -1.0f) ? 1 : 0;
  if (clipped > 0) spdlog::debug("mix: {} samples outside [-1, 1]", clipped);
  if (report != nullptr) report->clipped_samples = clipped;
  return out;
}

MixSpec DrawMixSpec(const std::vector<AudioClip>& pool, double base_seconds, double snr_db,
                    Rng& rng) {
  if (pool.empty()) throw InputError("mix: empty noise pool");
  MixSpec spec;
  spec.snr_db = snr_db;
  const int count = rng.UniformInt(1, kMaxNoiseSegments);
  for (int i = 0; i < count; ++i) {
    const AudioClip& seg = pool[static_cast<std::size_t>(rng.UniformInt(0, static_cast<int>(pool.size()) - 1))];
    const double room = base_seconds - seg.duration_s();
    if (room < 0) throw InputError("mix: noise segment longer than the base clip");
    // Offsets are whole samples so the placement is exactly reproducible.
    const double offset = std::floor(rng.Uniform(0.0, room) * seg.sample_rate) / seg.sample_rate;
    spec.noise_clips.push_back(seg);
    spec.insert_offsets.push_back(offset);
  }
  return spec;
}

}  // namespace sscaf::audio
