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

#ifndef SSCAF_COMMON_LABELS_H_
#define SSCAF_COMMON_LABELS_H_

#include <array>
#include <optional>
#include <string_view>

namespace sscaf {

inline constexpr int kNumClasses = 24;
inline constexpr int kCanonicalSampleRate = 16000;
inline constexpr double kClipSeconds = 15.0;

// Source classes in manifest column order.
inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "aircraft",        "bells",           "bird_tweets",  "bus",
    "car",             "children",        "construction", "dog_bark",
    "footsteps",       "general_traffic", "horn",         "laughter",
    "motorcycle",      "music",           "non_identifiable", "rail",
    "rustling_leaves", "screeching_brakes", "shouting",   "siren",
    "speech",          "ventilation",     "water",        "other",
};

inline constexpr std::array<std::string_view, kNumClasses> kClassDisplayNames = {
    "Aircraft",        "Bells",             "Bird tweets",  "Bus",
    "Car",             "Children",          "Construction", "Dog bark",
    "Footsteps",       "General traffic",   "Horn",         "Laughter",
    "Motorcycle",      "Music",             "Non-identifiable", "Rail",
    "Rustling leaves", "Screeching brakes", "Shouting",     "Siren",
    "Speech",          "Ventilation",       "Water",        "Other",
};

inline std::optional<int> ClassIndex(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return i;
  }
  return std::nullopt;
}

}  // namespace sscaf

#endif  // SSCAF_COMMON_LABELS_H_
