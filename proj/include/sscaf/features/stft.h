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

// Short-time Fourier analysis shared by every feature stream.

#ifndef SSCAF_FEATURES_STFT_H_
#define SSCAF_FEATURES_STFT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "sscaf/audio/audio_clip.h"
#include "sscaf/common/labels.h"

namespace sscaf::features {

// Frame geometry. The window is round(sample_rate * window_ms / 1000)
// samples and the hop is floor(window * (1 - overlap)); at 16 kHz that is a
// 736-sample window with a 490-sample hop, giving 489 frames per 15 s clip.
struct Framing {
  int sample_rate = kCanonicalSampleRate;
  double window_ms = 46.0;
  double overlap = 1.0 / 3.0;

  int window() const;
  int hop() const;
  // floor((n - window) / hop) + 1; throws InputError if n < window.
  std::size_t NumFrames(std::size_t num_samples) const;
  double frame_rate() const { return static_cast<double>(sample_rate) / hop(); }
};

// Symmetric Hamming window, w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1)).
std::vector<double> HammingWindow(int n);

// Row-major power spectrogram, frames x (window / 2 + 1) bins.
struct Spectrogram {
  std::vector<double> power;
  std::size_t frames = 0;
  std::size_t bins = 0;
  double frame_rate = 0.0;
  int n_fft = 0;
  int sample_rate = 0;

  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(power).subspan(t * bins, bins);
  }
  double bin_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
  }
};

// |FFT|^2 of Hamming-windowed frames. Throws InputError if the clip is shorter
// than one window or its rate differs from the framing's.
Spectrogram Stft(const audio::AudioClip& clip, const Framing& framing = {});

// Power spectrum |X_k|^2, k = 0..n/2, of one already-windowed frame.
std::vector<double> PowerSpectrum(std::span<const double> frame);

}  // namespace sscaf::features

#endif  // SSCAF_FEATURES_STFT_H_
