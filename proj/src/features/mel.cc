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

#include "sscaf/features/mel.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::features {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank MakeMelFilterbank(const MelConfig& config, int n_fft, int sample_rate) {
  const double f_hi = config.f_hi > 0.0 ? config.f_hi : sample_rate / 2.0;
  if (config.n_mels < 1) throw ConfigError(fmt::format("mel: n_mels = {} < 1", config.n_mels));
  if (!(config.f_lo < f_hi)) {
    throw ConfigError(fmt::format("mel: f_lo {} Hz is not below f_hi {} Hz", config.f_lo, f_hi));
  }
  if (n_fft < 2) throw ConfigError(fmt::format("mel: n_fft {} too small", n_fft));

  MelFilterbank fb;
  fb.n_mels = config.n_mels;
  fb.bins = static_cast<std::size_t>(n_fft / 2 + 1);
  fb.weights.assign(static_cast<std::size_t>(config.n_mels) * fb.bins, 0.0);

  const double mel_lo = HzToMel(config.f_lo);
  const double mel_hi = HzToMel(f_hi);
  std::vector<double> edges(static_cast<std::size_t>(config.n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(config.n_mels + 1));
  }
  const double bin_hz = static_cast<double>(sample_rate) / n_fft;
  for (int m = 0; m < config.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    fb.centers_hz.push_back(mid);
    double* row = fb.weights.data() + static_cast<std::size_t>(m) * fb.bins;
    double sum = 0.0;
    for (std::size_t k = 0; k < fb.bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      row[k] = w;
      sum += w;
    }
    if (sum <= 0.0) {
      const auto nearest = std::min<std::size_t>(
          fb.bins - 1, static_cast<std::size_t>(std::lround(mid / bin_hz)));
      row[nearest] = 1.0;
      sum = 1.0;
    }
    for (std::size_t k = 0; k < fb.bins; ++k) row[k] /= sum;
  }
  return fb;
}

std::vector<double> ApplyFilterbank(const Spectrogram& spec, const MelFilterbank& fb) {
  if (spec.bins != fb.bins) {
    throw ShapeError(fmt::format("mel: spectrogram has {} bins, filterbank expects {}", spec.bins, fb.bins));
  }
  std::vector<double> out(spec.frames * static_cast<std::size_t>(fb.n_mels));
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const double* p = spec.power.data() + t * spec.bins;
    for (int m = 0; m < fb.n_mels; ++m) {
      const double* w = fb.weights.data() + static_cast<std::size_t>(m) * fb.bins;
      double acc = 0.0;
      for (std::size_t k = 0; k < fb.bins; ++k) acc += w[k] * p[k];
      out[t * fb.n_mels + m] = acc;
    }
  }
  return out;
}

std::vector<double> LogMel(const Spectrogram& spec, const MelConfig& config) {
  const auto fb = MakeMelFilterbank(config, spec.n_fft, spec.sample_rate);
  auto out = ApplyFilterbank(spec, fb);
  for (auto& v : out) v = std::log(v + kLogFloor);
  return out;
}

}  // namespace sscaf::features
