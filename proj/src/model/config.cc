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

#include "sscaf/model/config.h"

#include <algorithm>

#include <fmt/format.h>

#include "sscaf/common/error.h"

namespace sscaf::model {

namespace {

int Scale(int w) { return std::max(1, w / kTinyDivisor); }

std::vector<int> ScaleAll(const std::vector<int>& widths) {
  std::vector<int> out;
  for (const int w : widths) out.push_back(Scale(w));
  return out;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> GetInts(const KeyValueConfig& kv, const std::string& key, const std::vector<int>& fallback) {
  if (!kv.Has(key)) return fallback;
  std::vector<int> out;
  for (const auto& item : kv.GetList(key, {})) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("config: '{}' has non-integer entry '{}'", key, item));
    }
  }
  return out;
}

}  // namespace

std::string ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDcnnCaf: return "dcnn-caf";
    case ModelKind::kMelOnly: return "mel-only";
    case ModelKind::kRmsOnly: return "rms-only";
    case ModelKind::kDnn: return "dnn";
    case ModelKind::kCnn: return "cnn";
    case ModelKind::kCnnTransformer: return "cnn-transformer";
  }
  return "unknown";
}

ModelKind ParseModelKind(const std::string& name) {
  for (const auto kind : {ModelKind::kDcnnCaf, ModelKind::kMelOnly, ModelKind::kRmsOnly, ModelKind::kDnn,
                          ModelKind::kCnn, ModelKind::kCnnTransformer}) {
    if (ModelKindName(kind) == name) return kind;
  }
  throw ConfigError(fmt::format(
      "unknown model kind '{}' (expected dcnn-caf, mel-only, rms-only, dnn, cnn or cnn-transformer)", name));
}

int FitHeads(int heads, int width) {
  for (int h = std::min(heads, width); h > 1; --h) {
    if (width % h == 0) return h;
  }
  return 1;
}

DcnnCafConfig DcnnCafConfig::Effective() const {
  if (!tiny) return *this;
  DcnnCafConfig c = *this;
  c.tiny = false;
  c.conv_filters = ScaleAll(conv_filters);
  c.d_model = Scale(d_model);
  c.heads = FitHeads(heads, c.d_model);
  c.embedding_dim = Scale(embedding_dim);
  c.fusion_dim = Scale(fusion_dim);
  c.dnn_widths = ScaleAll(dnn_widths);
  c.cnn_filters = ScaleAll(cnn_filters);
  return c;
}

void DcnnCafConfig::Validate() const {
  const DcnnCafConfig e = Effective();
  if (e.conv_filters.empty()) throw ConfigError("model: conv_filters is empty");
  for (const int w : e.conv_filters) {
    if (w < 1) throw ConfigError("model: conv_filters entries must be positive");
  }
  if (e.conv_filters.back() != e.d_model) {
    throw ConfigError(fmt::format("model: last conv width {} must equal d_model {}", e.conv_filters.back(), e.d_model));
  }
  if (e.heads < 1 || e.d_model % e.heads != 0) {
    throw ConfigError(fmt::format("model: d_model {} is not divisible by {} heads", e.d_model, e.heads));
  }
  const int blocks = static_cast<int>(e.conv_filters.size());
  if (e.n_frames < 1 || e.n_frames % (1 << blocks) != 0) {
    throw ConfigError(fmt::format("model: n_frames {} must be a positive multiple of 2^{}", e.n_frames, blocks));
  }
  if (e.n_mels < 1 || e.n_classes < 1 || e.embedding_dim < 1 || e.fusion_dim < 1) {
    throw ConfigError("model: n_mels, n_classes, embedding_dim and fusion_dim must be positive");
  }
  if (e.dnn_widths.empty() || e.cnn_filters.empty()) throw ConfigError("model: baseline widths are empty");
  for (const int w : e.dnn_widths) {
    if (w < 1) throw ConfigError("model: dnn_widths entries must be positive");
  }
  for (const int w : e.cnn_filters) {
    if (w < 1) throw ConfigError("model: cnn_filters entries must be positive");
  }
  if (e.n_frames % (1 << e.cnn_filters.size()) != 0) {
    throw ConfigError("model: n_frames must be divisible by the CNN baseline's pooling");
  }
  if (e.encoder_heads < 1 || e.encoder_ffn_multiplier < 1) {
    throw ConfigError("model: encoder_heads and encoder_ffn_multiplier must be positive");
  }
}

DcnnCafConfig DcnnCafConfig::Tiny() {
  DcnnCafConfig c;
  c.tiny = true;
  return c;
}

DcnnCafConfig DcnnCafConfig::FromKeyValue(const KeyValueConfig& kv) {
  DcnnCafConfig c;
  c.conv_filters = GetInts(kv, "model.conv_filters", c.conv_filters);
  c.n_mels = kv.GetInt("model.n_mels", c.n_mels);
  c.n_frames = kv.GetInt("model.n_frames", c.n_frames);
  c.d_model = kv.GetInt("model.d_model", c.d_model);
  c.heads = kv.GetInt("model.heads", c.heads);
  c.n_classes = kv.GetInt("model.n_classes", c.n_classes);
  c.embedding_dim = kv.GetInt("model.embedding_dim", c.embedding_dim);
  c.fusion_dim = kv.GetInt("model.fusion_dim", c.fusion_dim);
  c.tiny = kv.GetBool("model.tiny", c.tiny);
  c.pool_freq = kv.GetBool("model.pool_freq", c.pool_freq);
  c.dnn_widths = GetInts(kv, "model.dnn_widths", c.dnn_widths);
  c.cnn_filters = GetInts(kv, "model.cnn_filters", c.cnn_filters);
  c.encoder_heads = kv.GetInt("model.encoder_heads", c.encoder_heads);
  c.encoder_ffn_multiplier = kv.GetInt("model.encoder_ffn_multiplier", c.encoder_ffn_multiplier);
  c.Validate();
  return c;
}

void DcnnCafConfig::ToKeyValue(KeyValueConfig& kv) const {
  kv.Set("model.conv_filters", JoinInts(conv_filters));
  kv.Set("model.n_mels", n_mels);
  kv.Set("model.n_frames", n_frames);
  kv.Set("model.d_model", d_model);
  kv.Set("model.heads", heads);
  kv.Set("model.n_classes", n_classes);
  kv.Set("model.embedding_dim", embedding_dim);
  kv.Set("model.fusion_dim", fusion_dim);
  kv.Set("model.tiny", std::string(tiny ? "true" : "false"));
  kv.Set("model.pool_freq", std::string(pool_freq ? "true" : "false"));
  kv.Set("model.dnn_widths", JoinInts(dnn_widths));
  kv.Set("model.cnn_filters", JoinInts(cnn_filters));
  kv.Set("model.encoder_heads", encoder_heads);
  kv.Set("model.encoder_ffn_multiplier", encoder_ffn_multiplier);
}

}  // namespace sscaf::model
