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

#include "sscaf/audio/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "sscaf/audio/mix.h"
#include "sscaf/audio/wav.h"
#include "sscaf/common/error.h"
#include "sscaf/common/labels.h"
#include "sscaf/common/parallel.h"
#include "sscaf/features/level.h"

namespace sscaf::audio {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFadeSeconds = 0.02;
constexpr double kNoiseBankLevelDb = -25.0;
constexpr double kPeakLimit = 0.99;

// RBJ-cookbook biquad, direct form I.
class Biquad {
 public:
  static Biquad BandPass(double f0, double q, int sr) {
    const double w = kTwoPi * f0 / sr, alpha = std::sin(w) / (2 * q);
    return Biquad(alpha, 0.0, -alpha, 1 + alpha, -2 * std::cos(w), 1 - alpha);
  }
  static Biquad HighPass(double f0, double q, int sr) {
    const double w = kTwoPi * f0 / sr, alpha = std::sin(w) / (2 * q), c = std::cos(w);
    return Biquad((1 + c) / 2, -(1 + c), (1 + c) / 2, 1 + alpha, -2 * c, 1 - alpha);
  }
  static Biquad LowPass(double f0, double q, int sr) {
    const double w = kTwoPi * f0 / sr, alpha = std::sin(w) / (2 * q), c = std::cos(w);
    return Biquad((1 - c) / 2, 1 - c, (1 - c) / 2, 1 + alpha, -2 * c, 1 - alpha);
  }

  double operator()(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  Biquad(double b0, double b1, double b2, double a0, double a1, double a2)
      : b0_(b0 / a0), b1_(b1 / a0), b2_(b2 / a0), a1_(a1 / a0), a2_(a2 / a0) {}
  double b0_, b1_, b2_, a1_, a2_;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

using Signal = std::vector<double>;

// Adds a decaying sinusoid starting at sample `start`.
void AddRing(Signal& s, std::size_t start, double freq, double tau, double amp, int sr) {
  const auto len = static_cast<std::size_t>(6 * tau * sr);
  for (std::size_t i = 0; i < len && start + i < s.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    s[start + i] += amp * std::exp(-t / tau) * std::sin(kTwoPi * freq * t);
  }
}

// Raised-cosine gate: 1 inside [a, b) seconds with short ramps.
double Gate(double t, double a, double b, double ramp) {
  if (t < a || t >= b) return 0.0;
  const double r = std::min({ramp, (b - a) / 2});
  if (t < a + r) return 0.5 - 0.5 * std::cos(std::numbers::pi * (t - a) / r);
  if (t > b - r) return 0.5 - 0.5 * std::cos(std::numbers::pi * (b - t) / r);
  return 1.0;
}

Signal RenderEngine(std::size_t n, int sr, Rng& rng) {
  const double f0 = rng.Uniform(70, 130);
  const double drift_rate = rng.Uniform(0.1, 0.4), drift_phase = rng.Uniform(0, kTwoPi);
  Biquad rumble = Biquad::LowPass(300, 0.7, sr);
  Signal s(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double f = f0 * (1 + 0.04 * std::sin(kTwoPi * drift_rate * t + drift_phase));
    phase += kTwoPi * f / sr;
    double v = 0.0;
    for (int k = 1; k <= 12; ++k) v += std::sin(k * phase) / k;
    const double firing = 1 + 0.3 * std::sin(phase / 2);
    s[i] = firing * v + 0.8 * rumble(rng.Normal());
  }
  return s;
}

Signal RenderConstruction(std::size_t n, int sr, Rng& rng) {
  Signal s(n);
  const double rate = rng.Uniform(2, 5);
  const double ring = rng.Uniform(800, 2500);
  double t = rng.Uniform(0, 1 / rate);
  const double seconds = static_cast<double>(n) / sr;
  while (t < seconds) {
    const auto start = static_cast<std::size_t>(t * sr);
    const auto burst = static_cast<std::size_t>(0.15 * sr);
    for (std::size_t i = 0; i < burst && start + i < n; ++i) {
      s[start + i] += 2.0 * rng.Normal() * std::exp(-static_cast<double>(i) / (0.03 * sr));
    }
    AddRing(s, start, ring * rng.Uniform(0.95, 1.05), 0.08, 1.5, sr);
    t += (1 / rate) * rng.Uniform(0.8, 1.2);
  }
  return s;
}

Signal RenderSiren(std::size_t n, int sr, Rng& rng) {
  const double fc = rng.Uniform(800, 1100), dev = rng.Uniform(200, 400);
  const double period = rng.Uniform(1.5, 4.0), p0 = rng.Uniform(0, kTwoPi);
  Signal s(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    phase += kTwoPi * (fc + dev * std::sin(kTwoPi * t / period + p0)) / sr;
    s[i] = std::sin(phase) + 0.3 * std::sin(2 * phase);
  }
  return s;
}

Signal RenderHorn(std::size_t n, int sr, Rng& rng) {
  const double f1 = rng.Uniform(380, 450), f2 = f1 * 1.26;
  const double seconds = static_cast<double>(n) / sr;
  Signal s(n);
  double t = rng.Uniform(0, 0.5);
  while (t < seconds) {
    const double len = rng.Uniform(0.4, 1.2);
    const auto a = static_cast<std::size_t>(t * sr);
    const auto b = std::min(n, static_cast<std::size_t>((t + len) * sr));
    for (std::size_t i = a; i < b; ++i) {
      const double u = static_cast<double>(i) / sr;
      const double g = Gate(u, t, t + len, 0.02);
      double v = 0.0;
      for (int k = 1; k <= 6; ++k) v += (std::sin(kTwoPi * k * f1 * u) + std::sin(kTwoPi * k * f2 * u)) / k;
      s[i] += g * v;
    }
    t += len + rng.Uniform(0.3, 1.0);
  }
  return s;
}

Signal RenderMusic(std::size_t n, int sr, Rng& rng) {
  static constexpr double kScale[] = {220.0, 246.9, 277.2, 329.6, 370.0, 440.0,
                                      493.9, 554.4, 659.3, 740.0, 880.0};
  const double beat = rng.Uniform(0.25, 0.5);
  const double seconds = static_cast<double>(n) / sr;
  Signal s(n);
  for (double t = 0; t < seconds; t += beat) {
    const int notes = rng.UniformInt(2, 3);
    const auto a = static_cast<std::size_t>(t * sr);
    const auto b = std::min(n, static_cast<std::size_t>((t + beat) * sr));
    for (int j = 0; j < notes; ++j) {
      const double f = kScale[rng.UniformInt(0, 10)];
      for (std::size_t i = a; i < b; ++i) {
        const double u = static_cast<double>(i - a) / sr;
        const double env = std::min(1.0, u / 0.01) * std::exp(-u / (0.6 * beat));
        double v = 0.0, amp = 1.0;
        for (int k = 1; k <= 5; ++k, amp *= 0.6) v += amp * std::sin(kTwoPi * k * f * u);
        s[i] += env * v;
      }
    }
    AddRing(s, a, 60.0, 0.05, 2.0, sr);
  }
  return s;
}

Signal RenderSpeech(std::size_t n, int sr, Rng& rng) {
  const double seconds = static_cast<double>(n) / sr;
  Signal s(n);
  double t = rng.Uniform(0, 0.2);
  while (t < seconds) {
    const double len = rng.Uniform(0.15, 0.3);
    const double f0 = rng.Uniform(100, 220), glide = rng.Uniform(-0.2, 0.2);
    const double formant1 = rng.Uniform(400, 800), formant2 = rng.Uniform(1000, 2200);
    const auto a = static_cast<std::size_t>(t * sr);
    const auto b = std::min(n, static_cast<std::size_t>((t + len) * sr));
    double phase = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      const double u = static_cast<double>(i) / sr;
      phase += kTwoPi * f0 * (1 + glide * (u - t) / len) / sr;
      double v = 0.0;
      for (int k = 1; k * f0 < 3500; ++k) {
        const double fk = k * f0;
        const double w = std::exp(-std::pow((fk - formant1) / 150, 2)) +
                         0.6 * std::exp(-std::pow((fk - formant2) / 200, 2)) + 0.02;
        v += w * std::sin(k * phase);
      }
      s[i] += Gate(u, t, t + len, 0.03) * v;
    }
    t += len + rng.Uniform(0.05, 0.2);
  }
  return s;
}

Signal RenderVentilation(std::size_t n, int sr, Rng& rng) {
  Biquad band = Biquad::BandPass(rng.Uniform(300, 800), 0.7, sr);
  const double hum = rng.Uniform(90, 150);
  Signal s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    s[i] = band(rng.Normal()) + 0.1 * std::sin(kTwoPi * hum * t);
  }
  return s;
}

Signal RenderWaterDrip(std::size_t n, int sr, Rng& rng) {
  const double rate = rng.Uniform(3, 8);
  const double seconds = static_cast<double>(n) / sr;
  Signal s(n);
  for (double t = rng.Uniform(0, 1 / rate); t < seconds; t += -std::log(1 - rng.Uniform()) / rate) {
    const double f_start = rng.Uniform(800, 1500);
    const auto start = static_cast<std::size_t>(t * sr);
    double phase = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(0.12 * sr) && start + i < n; ++i) {
      const double u = static_cast<double>(i) / sr;
      phase += kTwoPi * f_start * (1 + 0.5 * std::min(1.0, u / 0.03)) / sr;
      s[start + i] += std::exp(-u / 0.02) * std::sin(phase);
    }
  }
  return s;
}

Signal RenderBird(std::size_t n, int sr, Rng& rng) {
  const double fc = rng.Uniform(3000, 5500), dev = rng.Uniform(300, 1200);
  const double fm = rng.Uniform(15, 40);
  const double seconds = static_cast<double>(n) / sr;
  Signal s(n);
  double t = rng.Uniform(0, 0.5);
  while (t < seconds) {
    const int syllables = rng.UniformInt(2, 6);
    for (int j = 0; j < syllables && t < seconds; ++j) {
      const double len = rng.Uniform(0.06, 0.15);
      const auto a = static_cast<std::size_t>(t * sr);
      const auto b = std::min(n, static_cast<std::size_t>((t + len) * sr));
      double phase = 0.0;
      for (std::size_t i = a; i < b; ++i) {
        const double u = static_cast<double>(i - a) / sr;
        phase += kTwoPi * (fc + dev * std::sin(kTwoPi * fm * u)) / sr;
        s[i] += std::sin(std::numbers::pi * u / len) * std::sin(phase);
      }
      t += len + rng.Uniform(0.03, 0.08);
    }
    t += rng.Uniform(0.3, 1.5);
  }
  return s;
}

Signal RenderRustlingLeaves(std::size_t n, int sr, Rng& rng) {
  Biquad hp1 = Biquad::HighPass(rng.Uniform(1500, 3000), 0.7, sr);
  Biquad hp2 = Biquad::HighPass(1500, 0.7, sr);
  Biquad gust = Biquad::LowPass(rng.Uniform(2, 5), 0.7, sr);
  Signal s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::abs(gust(rng.Normal())) * 40 + 0.2;
    s[i] = g * hp2(hp1(rng.Normal()));
  }
  return s;
}

void NormalizeRms(Signal& s, double target_rms) {
  double acc = 0.0;
  for (const double v : s) acc += v * v;
  const double rms = s.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(s.size()));
  if (rms <= 0.0) return;
  for (auto& v : s) v *= target_rms / rms;
}

void ApplyFades(Signal& s, int sr) {
  const auto fade = std::min(s.size() / 2, static_cast<std::size_t>(kFadeSeconds * sr));
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = static_cast<double>(i) / static_cast<double>(fade);
    s[i] *= g;
    s[s.size() - 1 - i] *= g;
  }
}

double DbToAmplitude(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace

const std::vector<Archetype>& ArchetypeLibrary() {
  static const auto* library = new std::vector<Archetype>{
      {"engine", "general_traffic", 3.0},   {"construction", "construction", 2.5},
      {"siren", "siren", 2.0},              {"horn", "horn", 2.0},
      {"music", "music", 1.0},              {"speech", "speech", 0.0},
      {"ventilation", "ventilation", -0.5}, {"water_drip", "water", -0.5},
      {"bird", "bird_tweets", -1.0},        {"rustling_leaves", "rustling_leaves", -1.5},
  };
  return *library;
}

std::vector<std::string> ArchetypeNames() {
  std::vector<std::string> names;
  for (const auto& a : ArchetypeLibrary()) names.push_back(a.name);
  return names;
}

namespace {

const Archetype* FindArchetype(const std::string& name) {
  for (const auto& a : ArchetypeLibrary()) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

}  // namespace

std::vector<Archetype> SynthConfig::Resolve() const {
  const auto& names = archetypes;
  if (names.empty()) throw ConfigError("synth: no archetypes selected");
  std::vector<Archetype> out;
  for (const auto& name : names) {
    const Archetype* a = FindArchetype(name);
    if (a == nullptr) throw ConfigError(fmt::format("synth: unknown archetype '{}'", name));
    for (const auto& existing : out) {
      if (existing.name == name) throw ConfigError(fmt::format("synth: archetype '{}' listed twice", name));
    }
    out.push_back(*a);
  }
  for (const auto& [name, w] : weights) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Archetype& a) { return a.name == name; });
    if (it == out.end()) {
      throw ConfigError(fmt::format("synth: weight given for unselected archetype '{}'", name));
    }
    it->weight = w;
  }
  if (out.size() > static_cast<std::size_t>(kNumClasses)) throw ConfigError("synth: more than 24 archetypes");
  if (sample_rate <= 0) throw ConfigError("synth: sample_rate must be positive");
  if (!(clip_seconds > 0)) throw ConfigError("synth: clip_seconds must be positive");
  if (min_events < 0 || max_events < min_events) {
    throw ConfigError(fmt::format("synth: bad event range [{}, {}]", min_events, max_events));
  }
  if (train_clips < 0 || val_clips < 0 || test_clips < 0 || noise_segments < 0) {
    throw ConfigError("synth: clip counts must be non-negative");
  }
  if (!(level_scale_db > 0)) throw ConfigError("synth: level_scale_db must be positive");
  if (event_level_hi_db < event_level_lo_db) throw ConfigError("synth: event level range is inverted");
  return out;
}

SynthConfig SynthConfig::FromKeyValue(const KeyValueConfig& kv) {
  SynthConfig c;
  c.archetypes = kv.GetList("synth.archetypes", ArchetypeNames());
  if (kv.Has("synth.archetypes") && c.archetypes.empty()) {
    throw ConfigError("synth: 'synth.archetypes' selects no archetypes");
  }
  for (const auto& [key, value] : kv.values()) {
    static const std::string kPrefix = "synth.weight.";
    if (key.rfind(kPrefix, 0) == 0) c.weights[key.substr(kPrefix.size())] = kv.GetDouble(key, 0.0);
  }
  c.train_clips = kv.GetInt("synth.train_clips", c.train_clips);
  c.val_clips = kv.GetInt("synth.val_clips", c.val_clips);
  c.test_clips = kv.GetInt("synth.test_clips", c.test_clips);
  c.sample_rate = kv.GetInt("synth.sample_rate", c.sample_rate);
  c.clip_seconds = kv.GetDouble("synth.clip_seconds", c.clip_seconds);
  c.min_events = kv.GetInt("synth.min_events", c.min_events);
  c.max_events = kv.GetInt("synth.max_events", c.max_events);
  c.noise_floor_db = kv.GetDouble("synth.noise_floor_db", c.noise_floor_db);
  c.event_level_lo_db = kv.GetDouble("synth.event_level_lo_db", c.event_level_lo_db);
  c.event_level_hi_db = kv.GetDouble("synth.event_level_hi_db", c.event_level_hi_db);
  c.base_annoyance = kv.GetDouble("synth.base_annoyance", c.base_annoyance);
  c.level_coefficient = kv.GetDouble("synth.level_coefficient", c.level_coefficient);
  c.level_ref_db = kv.GetDouble("synth.level_ref_db", c.level_ref_db);
  c.level_scale_db = kv.GetDouble("synth.level_scale_db", c.level_scale_db);
  c.noise_segments = kv.GetInt("synth.noise_segments", c.noise_segments);
  c.Resolve();
  return c;
}

void SynthConfig::ToKeyValue(KeyValueConfig& kv) const {
  std::string list;
  for (const auto& a : archetypes) list += (list.empty() ? "" : ",") + a;
  kv.Set("synth.archetypes", list);
  for (const auto& [name, w] : weights) kv.Set("synth.weight." + name, w);
  kv.Set("synth.train_clips", train_clips);
  kv.Set("synth.val_clips", val_clips);
  kv.Set("synth.test_clips", test_clips);
  kv.Set("synth.sample_rate", sample_rate);
  kv.Set("synth.clip_seconds", clip_seconds);
  kv.Set("synth.min_events", min_events);
  kv.Set("synth.max_events", max_events);
  kv.Set("synth.noise_floor_db", noise_floor_db);
  kv.Set("synth.event_level_lo_db", event_level_lo_db);
  kv.Set("synth.event_level_hi_db", event_level_hi_db);
  kv.Set("synth.base_annoyance", base_annoyance);
  kv.Set("synth.level_coefficient", level_coefficient);
  kv.Set("synth.level_ref_db", level_ref_db);
  kv.Set("synth.level_scale_db", level_scale_db);
  kv.Set("synth.noise_segments", noise_segments);
}

AudioClip RenderArchetype(const std::string& name, double seconds, int sample_rate, Rng& rng) {
  const std::size_t n = SecondsToSamples(seconds, sample_rate);
  Signal s;
  if (name == "engine") s = RenderEngine(n, sample_rate, rng);
  else if (name == "construction") s = RenderConstruction(n, sample_rate, rng);
  else if (name == "siren") s = RenderSiren(n, sample_rate, rng);
  else if (name == "horn") s = RenderHorn(n, sample_rate, rng);
  else if (name == "music") s = RenderMusic(n, sample_rate, rng);
  else if (name == "speech") s = RenderSpeech(n, sample_rate, rng);
  else if (name == "ventilation") s = RenderVentilation(n, sample_rate, rng);
  else if (name == "water_drip") s = RenderWaterDrip(n, sample_rate, rng);
  else if (name == "bird") s = RenderBird(n, sample_rate, rng);
  else if (name == "rustling_leaves") s = RenderRustlingLeaves(n, sample_rate, rng);
  else throw ConfigError(fmt::format("synth: unknown archetype '{}'", name));
  NormalizeRms(s, 1.0);
  ApplyFades(s, sample_rate);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(s.begin(), s.end());
  return clip;
}

double AnnoyanceRule(const SynthConfig& config, const std::vector<Archetype>& present,
                     double laeq_db) {
  double a = config.base_annoyance;
  for (const auto& arch : present) a += arch.weight;
  a += config.level_coefficient * (laeq_db - config.level_ref_db) / config.level_scale_db;
  return RoundAnnoyance(std::clamp(a, kMinAnnoyance, kMaxAnnoyance));
}

SynthClip GenerateClip(const SynthConfig& config, uint64_t seed, const std::string& clip_id,
                       const std::string& path) {
  const auto library = config.Resolve();
  const uint64_t clip_seed = MixSeed(seed, clip_id);
  Rng rng(clip_seed);
  const int sr = config.sample_rate;
  const std::size_t n = SecondsToSamples(config.clip_seconds, sr);

  Signal mix(n);
  const double floor_amp = DbToAmplitude(config.noise_floor_db);
  for (auto& v : mix) v = floor_amp * rng.Normal();

  const int k = static_cast<int>(library.size());
  const int count = rng.UniformInt(std::min(config.min_events, k), std::min(config.max_events, k));
  std::vector<int> order(library.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order.begin(), order.end());
  std::sort(order.begin(), order.begin() + count);

  SynthClip out;
  std::vector<Archetype> present;
  for (int e = 0; e < count; ++e) {
    const Archetype& arch = library[static_cast<std::size_t>(order[e])];
    Rng event_rng(MixSeed(clip_seed, static_cast<uint64_t>(e) + 1));
    const double duration = event_rng.Uniform(std::min(3.0, config.clip_seconds), config.clip_seconds);
    const double onset = event_rng.Uniform(0.0, config.clip_seconds - duration);
    const double level = event_rng.Uniform(config.event_level_lo_db, config.event_level_hi_db);
    const AudioClip event = RenderArchetype(arch.name, duration, sr, event_rng);
    const std::size_t start = SecondsToSamples(onset, sr);
    const double amp = DbToAmplitude(level);
    for (std::size_t i = 0; i < event.samples.size() && start + i < n; ++i) {
      mix[start + i] += amp * event.samples[i];
    }
    present.push_back(arch);
    out.events.push_back(arch.name);
  }

  // Peak limiting keeps the clip representable as 16-bit PCM; the level is
  // measured afterwards, so the rating always describes the stored audio.
  double peak = 0.0;
  for (const double v : mix) peak = std::max(peak, std::abs(v));
  if (peak > kPeakLimit) {
    for (auto& v : mix) v *= kPeakLimit / peak;
  }
  out.audio.sample_rate = sr;
  out.audio.samples.assign(mix.begin(), mix.end());
  out.laeq_db = features::AWeightedLeq(out.audio, features::Framing{.sample_rate = sr});
  out.record.clip_id = clip_id;
  out.record.path = path;
  for (const auto& arch : present) {
    const auto idx = ClassIndex(arch.label);
    if (!idx) throw ConfigError(fmt::format("synth: archetype '{}' maps to unknown class '{}'", arch.name, arch.label));
    out.record.labels[static_cast<std::size_t>(*idx)] = true;
  }
  out.record.annoyance = AnnoyanceRule(config, present, out.laeq_db);
  return out;
}

std::vector<SynthClip> GenerateSplit(const SynthConfig& config, uint64_t seed,
                                     const std::string& split, int count) {
  config.Resolve();
  std::vector<SynthClip> clips(static_cast<std::size_t>(std::max(count, 0)));
  ParallelFor(clips.size(), [&](std::size_t i) {
    const std::string id = fmt::format("{}_{:04d}", split, i);
    clips[i] = GenerateClip(config, seed, id, fmt::format("audio/{}/{}.wav", split, id));
  });
  return clips;
}

std::vector<AudioClip> GenerateNoiseSegments(const SynthConfig& config, uint64_t seed,
                                             const std::string& archetype) {
  if (FindArchetype(archetype) == nullptr) {
    throw ConfigError(fmt::format("synth: unknown archetype '{}'", archetype));
  }
  std::vector<AudioClip> segments;
  for (int j = 0; j < config.noise_segments; ++j) {
    Rng rng(MixSeed(seed, fmt::format("noise/{}/{}", archetype, j)));
    AudioClip seg = RenderArchetype(archetype, kNoiseSegmentSeconds, config.sample_rate, rng);
    for (auto& v : seg.samples) v = static_cast<float>(v * DbToAmplitude(kNoiseBankLevelDb));
    segments.push_back(std::move(seg));
  }
  return segments;
}

SyntheticDataset WriteSyntheticDataset(const SynthConfig& config, uint64_t seed,
                                       const std::filesystem::path& out_dir) {
  const auto library = config.Resolve();
  SyntheticDataset dataset;
  const std::pair<std::string, int> splits[] = {
      {"train", config.train_clips}, {"val", config.val_clips}, {"test", config.test_clips}};
  DatasetManifest* targets[] = {&dataset.train, &dataset.val, &dataset.test};
  for (int s = 0; s < 3; ++s) {
    const auto& [split, count] = splits[s];
    std::filesystem::create_directories(out_dir / "audio" / split);
    const auto clips = GenerateSplit(config, seed, split, count);
    DatasetManifest& manifest = *targets[s];
    manifest.split = split;
    manifest.base_dir = out_dir;
    for (const auto& clip : clips) {
      WriteWav(clip.audio, out_dir / clip.record.path);
      manifest.records.push_back(clip.record);
    }
    SaveManifest(manifest, out_dir / (split + ".csv"));
  }
  for (const auto& arch : library) {
    const auto dir = out_dir / "noise" / arch.name;
    std::filesystem::create_directories(dir);
    const auto segments = GenerateNoiseSegments(config, seed, arch.name);
    for (std::size_t j = 0; j < segments.size(); ++j) {
      WriteWav(segments[j], dir / fmt::format("{}_{:02d}.wav", arch.name, j));
    }
  }
  return dataset;
}

}  // namespace sscaf::audio
