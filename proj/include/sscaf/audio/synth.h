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

// Seeded synthetic soundscapes: a small stand-in for a labelled urban-sound
// corpus, with an annoyance rating computed by a fixed, documented rule.
//
// Each 15 s clip is a low-level noise floor plus events from distinct source
// archetypes (parameterized tone, chirp, filtered-noise and AM-noise
// families). The rating is
//   clamp(2 + sum of the present archetypes' weights
//           + 1.5 * (L_Aeq - level_ref_db) / level_scale_db, 1, 10)
// rounded to six decimals. Clips whose peak would exceed 0.99 are scaled
// down before the level is measured. Every clip is generated from
// MixSeed(seed, clip_id), so clips are independent of generation order.

#ifndef SSCAF_AUDIO_SYNTH_H_
#define SSCAF_AUDIO_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sscaf/audio/audio_clip.h"
#include "sscaf/audio/manifest.h"
#include "sscaf/common/kv_config.h"
#include "sscaf/common/random.h"

namespace sscaf::audio {

struct Archetype {
  std::string name;   // signal family
  std::string label;  // manifest class column it sets
  double weight = 0;  // annoyance contribution when present
};

// engine (+3), construction (+2.5), siren (+2), horn (+2), music (+1),
// speech (0), ventilation (-0.5), water_drip (-0.5), bird (-1),
// rustling_leaves (-1.5).
const std::vector<Archetype>& ArchetypeLibrary();
std::vector<std::string> ArchetypeNames();

struct SynthConfig {
  std::vector<std::string> archetypes = ArchetypeNames();
  std::map<std::string, double> weights;    // per-archetype weight overrides
  int train_clips = 300;
  int val_clips = 50;
  int test_clips = 100;
  int sample_rate = kCanonicalSampleRate;
  double clip_seconds = kClipSeconds;
  int min_events = 1;
  int max_events = 4;
  double noise_floor_db = -50.0;   // RMS of the background, dBFS
  double event_level_lo_db = -36.0;
  double event_level_hi_db = -16.0;
  double base_annoyance = 2.0;
  double level_coefficient = 1.5;
  double level_ref_db = -30.0;
  double level_scale_db = 10.0;
  int noise_segments = 4;          // per archetype in the noise bank

  // Archetypes selected by this config with weight overrides applied.
  // Throws ConfigError when none are selected or a name is unknown.
  std::vector<Archetype> Resolve() const;

  static SynthConfig FromKeyValue(const KeyValueConfig& kv);
  void ToKeyValue(KeyValueConfig& kv) const;
};

struct SynthClip {
  ClipRecord record;
  AudioClip audio;
  std::vector<std::string> events;  // archetype names present
  double laeq_db = 0.0;
};

// Renders `seconds` of one archetype's signal family at unit-ish scale.
AudioClip RenderArchetype(const std::string& name, double seconds, int sample_rate, Rng& rng);

// The annoyance rule applied to a set of present archetypes and a level.
double AnnoyanceRule(const SynthConfig& config, const std::vector<Archetype>& present,
                     double laeq_db);

// One clip; `path` is stored in the record verbatim.
SynthClip GenerateClip(const SynthConfig& config, uint64_t seed, const std::string& clip_id,
                       const std::string& path);

// All clips of one split, with ids "<split>_<index>" and paths
// "audio/<split>/<id>.wav".
std::vector<SynthClip> GenerateSplit(const SynthConfig& config, uint64_t seed,
                                     const std::string& split, int count);

// 5 s segments of one archetype for the mixing harness.
std::vector<AudioClip> GenerateNoiseSegments(const SynthConfig& config, uint64_t seed,
                                             const std::string& archetype);

struct SyntheticDataset {
  DatasetManifest train;
  DatasetManifest val;
  DatasetManifest test;
};

// Writes audio/<split>/*.wav, <split>.csv manifests and
// noise/<archetype>/*.wav under out_dir.
SyntheticDataset WriteSyntheticDataset(const SynthConfig& config, uint64_t seed,
                                       const std::filesystem::path& out_dir);

}  // namespace sscaf::audio

#endif  // SSCAF_AUDIO_SYNTH_H_
