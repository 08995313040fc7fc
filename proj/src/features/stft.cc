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

#include "sscaf/features/stft.h"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::features {

namespace {

// FFTW planning is not thread-safe, executing a plan on fresh buffers is.
// Plans are created once per size under a lock and shared afterwards.
class PlanCache {
 public:
  static PlanCache& Get() {
    static PlanCache* cache = new PlanCache();
    return *cache;
  }

  fftw_plan Plan(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

struct FftBuffers {
  explicit FftBuffers(int n)
      : in(fftw_alloc_real(static_cast<std::size_t>(n))),
        out(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1))) {}
  ~FftBuffers() {
    fftw_free(in);
    fftw_free(out);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
  double* in;
  fftw_complex* out;
};

}  // namespace

int Framing::window() const {
  return static_cast<int>(std::lround(sample_rate * window_ms / 1000.0));
}

int Framing::hop() const {
  return static_cast<int>(std::floor(window() * (1.0 - overlap)));
}

std::size_t Framing::NumFrames(std::size_t num_samples) const {
  const auto w = static_cast<std::size_t>(window());
  if (w < 2 || hop() < 1) {
    throw ConfigError(fmt::format("framing: window {} / hop {} are not usable", window(), hop()));
  }
  if (num_samples < w) {
    throw InputError(
        fmt::format("framing: clip of {} samples is shorter than one {}-sample window", num_samples, w));
  }
  return (num_samples - w) / static_cast<std::size_t>(hop()) + 1;
}

std::vector<double> HammingWindow(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int k = 0; k < n; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (n - 1));
  }
  return w;
}

std::vector<double> PowerSpectrum(std::span<const double> frame) {
  const int n = static_cast<int>(frame.size());
  FftBuffers buf(n);
  std::copy(frame.begin(), frame.end(), buf.in);
  fftw_execute_dft_r2c(PlanCache::Get().Plan(n), buf.in, buf.out);
  std::vector<double> power(static_cast<std::size_t>(n / 2 + 1));
  for (std::size_t k = 0; k < power.size(); ++k) {
    power[k] = buf.out[k][0] * buf.out[k][0] + buf.out[k][1] * buf.out[k][1];
  }
  return power;
}

Spectrogram Stft(const audio::AudioClip& clip, const Framing& framing) {
  if (clip.sample_rate != framing.sample_rate) {
    throw InputError(fmt::format("stft: clip at {} Hz, framing expects {} Hz", clip.sample_rate,
                                 framing.sample_rate));
  }
  const int n = framing.window();
  const int hop = framing.hop();
  const std::size_t frames = framing.NumFrames(clip.samples.size());
  const auto window = HammingWindow(n);

  Spectrogram spec;
  spec.frames = frames;
  spec.bins = static_cast<std::size_t>(n / 2 + 1);
  spec.frame_rate = framing.frame_rate();
  spec.n_fft = n;
  spec.sample_rate = clip.sample_rate;
  spec.power.resize(frames * spec.bins);

  const fftw_plan plan = PlanCache::Get().Plan(n);
  FftBuffers buf(n);
  for (std::size_t t = 0; t < frames; ++t) {
    const float* x = clip.samples.data() + t * static_cast<std::size_t>(hop);
    for (int k = 0; k < n; ++k) buf.in[k] = window[k] * static_cast<double>(x[k]);
    fftw_execute_dft_r2c(plan, buf.in, buf.out);
    double* row = spec.power.data() + t * spec.bins;
    for (std::size_t k = 0; k < spec.bins; ++k) {
      row[k] = buf.out[k][0] * buf.out[k][0] + buf.out[k][1] * buf.out[k][1];
    }
  }
  return spec;
}

}  // namespace sscaf::features
