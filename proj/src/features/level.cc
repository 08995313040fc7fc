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

#include "sscaf/features/level.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sscaf/common/error.h"

namespace sscaf::features {

namespace {

double AWeightingMagnitude(double f) {
  const double f2 = f * f;
  const double num = 12194.0 * 12194.0 * f2 * f2;
  const double den = (f2 + 20.6 * 20.6) *
                     std::sqrt((f2 + 107.7 * 107.7) * (f2 + 737.9 * 737.9)) *
                     (f2 + 12194.0 * 12194.0);
  return num / den;
}

}  // namespace

double AWeightingGainDb(double hz) {
  if (hz <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(AWeightingMagnitude(hz) / AWeightingMagnitude(1000.0));
}

double AWeightedLeq(const audio::AudioClip& clip, const Framing& framing) {
  if (clip.samples.empty()) throw InputError("a_weighted_leq: empty clip");
  const int n = framing.window();
  audio::AudioClip padded;
  const audio::AudioClip* source = &clip;
  if (clip.samples.size() < static_cast<std::size_t>(n)) {
    padded = clip;
    padded.samples.resize(static_cast<std::size_t>(n), 0.0f);
    source = &padded;
  }
  const Spectrogram spec = Stft(*source, framing);

  std::vector<double> gain(spec.bins);
  for (std::size_t k = 0; k < spec.bins; ++k) {
    const double f = spec.bin_hz(k);
    gain[k] = f > 0.0 ? std::pow(AWeightingMagnitude(f) / AWeightingMagnitude(1000.0), 2) : 0.0;
    // One-sided spectrum: interior bins stand for both signs of frequency.
    const bool edge = k == 0 || (n % 2 == 0 && k + 1 == spec.bins);
    if (!edge) gain[k] *= 2.0;
  }
  const auto window = HammingWindow(n);
  double window_energy = 0.0;
  for (const double w : window) window_energy += w * w;
  const double norm = 1.0 / (static_cast<double>(n) * window_energy);

  double total = 0.0;
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const auto row = spec.frame(t);
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.bins; ++k) acc += gain[k] * row[k];
    total += acc * norm;
  }
  const double mean_square = total / static_cast<double>(spec.frames);
  if (!(mean_square > 0.0)) return kLevelFloorDb;
  return std::max(kLevelFloorDb, 10.0 * std::log10(mean_square));
}

}  // namespace sscaf::features
