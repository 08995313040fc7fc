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

#include "sscaf/model/model.h"

#include <fmt/format.h>

#include "sscaf/autograd/ops.h"
#include "sscaf/common/error.h"
#include "sscaf/common/random.h"

namespace sscaf::model {

using ag::Shape;
using ag::Tensor;

namespace {

template <typename T>
using LedgerCheck = std::function<void(const std::string&, const Tensor<T>&)>;

// Pool width for a plane of width `w`: frequency is halved only while the
// option is on and the plane is still at least two bins wide.
int PoolWidth(bool pool_freq, int w) { return pool_freq && w >= 2 ? 2 : 1; }

// Stack of conv blocks (two conv-BN-ReLU layers and an average pool each)
// over a (B, 1, H, W) plane, ending in a frequency mean that yields the
// (B, H', C) sequence representation.
template <typename T>
class ConvBranch {
 public:
  ConvBranch() = default;
  ConvBranch(const std::string& name, int height, int width, const std::vector<int>& filters, bool pool_freq,
             uint64_t seed)
      : name_(name) {
    int in = 1;
    int h = height;
    int w = width;
    for (std::size_t i = 0; i < filters.size(); ++i) {
      Block block;
      const std::string prefix = fmt::format("{}.block{}", name, i + 1);
      Rng rng1(MixSeed(seed, prefix + ".conv1"));
      Rng rng2(MixSeed(seed, prefix + ".conv2"));
      block.conv1 = ag::ConvBnRelu<T>(in, filters[i], rng1);
      block.conv2 = ag::ConvBnRelu<T>(filters[i], filters[i], rng2);
      block.pool_w = PoolWidth(pool_freq, w);
      h /= 2;
      w /= block.pool_w;
      block.out_shape = {filters[i], h, w};
      blocks_.push_back(std::move(block));
      in = filters[i];
    }
    repr_shape_ = {h, in};
  }

  void AddLedger(std::vector<ShapeLedgerEntry>& ledger) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      ledger.push_back({fmt::format("{}.block{}", name_, i + 1), blocks_[i].out_shape});
    }
    ledger.push_back({name_ + ".repr", repr_shape_});
  }

  Tensor<T> operator()(const Tensor<T>& x, bool training, const LedgerCheck<T>& check) {
    Tensor<T> h = x;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      Block& b = blocks_[i];
      h = ag::AvgPool2d(b.conv2(b.conv1(h, training), training), 2, b.pool_w);
      check(fmt::format("{}.block{}", name_, i + 1), h);
    }
    Tensor<T> r = ag::Transpose(ag::Mean(h, 3), 1, 2);
    check(name_ + ".repr", r);
    return r;
  }

  void Collect(ag::NamedTensors<T>& out) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const std::string prefix = fmt::format("{}.block{}", name_, i + 1);
      blocks_[i].conv1.Collect(prefix + ".conv1", out);
      blocks_[i].conv2.Collect(prefix + ".conv2", out);
    }
  }

  const Shape& repr_shape() const { return repr_shape_; }

 private:
  struct Block {
    ag::ConvBnRelu<T> conv1;
    ag::ConvBnRelu<T> conv2;
    int pool_w = 1;
    Shape out_shape;
  };

  std::string name_;
  std::vector<Block> blocks_;
  Shape repr_shape_;
};

// Classification head (embedding + classifier + sigmoid) and annoyance head
// shared by every model kind. The annoyance head is a linear output, preceded
// by a ReLU layer of fusion_dim units when `arp_hidden_name` is non-empty.
template <typename T>
class JointHeads {
 public:
  JointHeads() = default;
  JointHeads(int ssc_in, int arp_in, const DcnnCafConfig& e, const std::string& arp_hidden_name, uint64_t seed)
      : arp_hidden_name_(arp_hidden_name) {
    Rng r1(MixSeed(seed, "ssc.embedding"));
    Rng r2(MixSeed(seed, "ssc.classifier"));
    Rng r4(MixSeed(seed, "arp.output"));
    embedding_ = ag::LinearLayer<T>(ssc_in, e.embedding_dim, r1);
    classifier_ = ag::LinearLayer<T>(e.embedding_dim, e.n_classes, r2);
    if (!arp_hidden_name.empty()) {
      Rng r3(MixSeed(seed, arp_hidden_name));
      arp_hidden_ = ag::LinearLayer<T>(arp_in, e.fusion_dim, r3);
      arp_in = e.fusion_dim;
    }
    arp_output_ = ag::LinearLayer<T>(arp_in, 1, r4);
  }

  // pooled: (B, ssc_in) -> (B, n_classes)
  Tensor<T> Ssc(const Tensor<T>& pooled, const LedgerCheck<T>& check) const {
    check("ssc.pooled", pooled);
    Tensor<T> emb = ag::Relu(embedding_(pooled));
    check("ssc.embedding", emb);
    Tensor<T> probs = ag::Sigmoid(classifier_(emb));
    check("probs", probs);
    return probs;
  }

  // x: (B, arp_in) or a (B, T, arp_in) sequence that is averaged over time
  // (after the hidden layer, if any). Returns (B).
  Tensor<T> Arp(const Tensor<T>& x, const LedgerCheck<T>& check) const {
    Tensor<T> h = x;
    if (!arp_hidden_name_.empty()) {
      h = ag::Relu(arp_hidden_(h));
      check(arp_hidden_name_, h);
    }
    if (h.rank() == 3) {
      h = ag::Mean(h, 1);
      check("arp.pooled", h);
    }
    Tensor<T> y = arp_output_(h);
    y = ag::Reshape(y, {y.dim(0)});
    check("annoyance", y);
    return y;
  }

  void Collect(ag::NamedTensors<T>& out) const {
    embedding_.Collect("ssc.embedding", out);
    classifier_.Collect("ssc.classifier", out);
    if (!arp_hidden_name_.empty()) arp_hidden_.Collect(arp_hidden_name_, out);
    arp_output_.Collect("arp.output", out);
  }

 private:
  std::string arp_hidden_name_;
  ag::LinearLayer<T> embedding_;
  ag::LinearLayer<T> classifier_;
  ag::LinearLayer<T> arp_hidden_;
  ag::LinearLayer<T> arp_output_;
};

// Ledger entries of the heads. `arp_seq_len` > 0 means the annoyance head
// sees a sequence of that length; `arp_in` is its feature width.
void AddHeadLedger(std::vector<ShapeLedgerEntry>& ledger, int ssc_in, const DcnnCafConfig& e,
                   const std::string& arp_hidden_name, int arp_seq_len, int arp_in) {
  ledger.push_back({"ssc.pooled", {ssc_in}});
  ledger.push_back({"ssc.embedding", {e.embedding_dim}});
  ledger.push_back({"probs", {e.n_classes}});
  int width = arp_in;
  if (!arp_hidden_name.empty()) {
    width = e.fusion_dim;
    ledger.push_back({arp_hidden_name, arp_seq_len > 0 ? Shape{arp_seq_len, width} : Shape{width}});
  }
  if (arp_seq_len > 0) ledger.push_back({"arp.pooled", {width}});
  ledger.push_back({"annoyance", {}});
}

// ---------------------------------------------------------------------------

template <typename T>
class DcnnCaf final : public Model<T> {
 public:
  DcnnCaf(const DcnnCafConfig& config, uint64_t seed) : Model<T>(config) {
    const DcnnCafConfig& e = this->effective_config();
    mel_ = ConvBranch<T>("mel_branch", e.n_frames, e.n_mels, e.conv_filters, e.pool_freq, seed);
    rms_ = ConvBranch<T>("rms_branch", e.n_frames, 1, e.conv_filters, e.pool_freq, seed);
    Rng r1(MixSeed(seed, "mha1"));
    Rng r2(MixSeed(seed, "mha2"));
    mha1_ = ag::MultiHeadAttention<T>(e.d_model, e.heads, r1);
    mha2_ = ag::MultiHeadAttention<T>(e.d_model, e.heads, r2);
    heads_ = JointHeads<T>(e.d_model, 2 * e.d_model, e, "arp.fusion", seed);

    std::vector<ShapeLedgerEntry> ledger;
    mel_.AddLedger(ledger);
    rms_.AddLedger(ledger);
    const int steps = mel_.repr_shape()[0];
    ledger.push_back({"mha1.out", {steps, e.d_model}});
    ledger.push_back({"mha1.attention", {e.heads, steps, steps}});
    ledger.push_back({"mha2.out", {steps, e.d_model}});
    ledger.push_back({"mha2.attention", {e.heads, steps, steps}});
    AddHeadLedger(ledger, e.d_model, e, "arp.fusion", steps, 2 * e.d_model);
    for (auto& entry : ledger) this->AddLedger(entry.name, entry.shape);
  }

  ModelKind kind() const override { return ModelKind::kDcnnCaf; }

  ModelOutput<T> Forward(const Tensor<T>& mel, const Tensor<T>& rms, bool training) override {
    CheckInputShapes(mel.shape(), rms.shape(), this->effective_config());
    const int batch = mel.dim(0);
    const LedgerCheck<T> check = [&](const std::string& n, const Tensor<T>& t) { this->CheckLedger(n, t, batch); };
    ModelOutput<T> out;
    out.r_mel = mel_(mel, training, check);
    out.r_rms = rms_(rms, training, check);
    const CrossAttentionOutput<T> cross = CrossAttend(mha1_, mha2_, out.r_mel, out.r_rms);
    check("mha1.out", cross.out_mel);
    check("mha1.attention", cross.attention1);
    check("mha2.out", cross.out_rms);
    check("mha2.attention", cross.attention2);
    out.attention1 = cross.attention1;
    out.attention2 = cross.attention2;
    out.probs = heads_.Ssc(ag::Mean(out.r_mel, 1), check);
    out.annoyance = heads_.Arp(ag::Concat<T>({cross.out_mel, cross.out_rms}, 2), check);
    return out;
  }

  ag::NamedTensors<T> Parameters() const override {
    ag::NamedTensors<T> out;
    mel_.Collect(out);
    rms_.Collect(out);
    mha1_.Collect("mha1", out);
    mha2_.Collect("mha2", out);
    heads_.Collect(out);
    return out;
  }

 private:
  ConvBranch<T> mel_;
  ConvBranch<T> rms_;
  ag::MultiHeadAttention<T> mha1_;
  ag::MultiHeadAttention<T> mha2_;
  JointHeads<T> heads_;
};

// Ablation with a single branch and no cross-attention or fusion layer: both
// heads read the time-averaged representation of the one branch.
template <typename T>
class SingleBranch final : public Model<T> {
 public:
  SingleBranch(ModelKind kind, const DcnnCafConfig& config, uint64_t seed) : Model<T>(config), kind_(kind) {
    const DcnnCafConfig& e = this->effective_config();
    use_mel_ = kind == ModelKind::kMelOnly;
    branch_ = use_mel_ ? ConvBranch<T>("mel_branch", e.n_frames, e.n_mels, e.conv_filters, e.pool_freq, seed)
                       : ConvBranch<T>("rms_branch", e.n_frames, 1, e.conv_filters, e.pool_freq, seed);
    heads_ = JointHeads<T>(e.d_model, e.d_model, e, "", seed);
    std::vector<ShapeLedgerEntry> ledger;
    branch_.AddLedger(ledger);
    AddHeadLedger(ledger, e.d_model, e, "", 0, e.d_model);
    for (auto& entry : ledger) this->AddLedger(entry.name, entry.shape);
  }

  ModelKind kind() const override { return kind_; }

  ModelOutput<T> Forward(const Tensor<T>& mel, const Tensor<T>& rms, bool training) override {
    CheckInputShapes(mel.shape(), rms.shape(), this->effective_config());
    const int batch = mel.dim(0);
    const LedgerCheck<T> check = [&](const std::string& n, const Tensor<T>& t) { this->CheckLedger(n, t, batch); };
    ModelOutput<T> out;
    const Tensor<T> r = branch_(use_mel_ ? mel : rms, training, check);
    (use_mel_ ? out.r_mel : out.r_rms) = r;
    const Tensor<T> pooled = ag::Mean(r, 1);
    out.probs = heads_.Ssc(pooled, check);
    out.annoyance = heads_.Arp(pooled, check);
    return out;
  }

  ag::NamedTensors<T> Parameters() const override {
    ag::NamedTensors<T> out;
    branch_.Collect(out);
    heads_.Collect(out);
    return out;
  }

 private:
  ModelKind kind_;
  bool use_mel_ = true;
  ConvBranch<T> branch_;
  JointHeads<T> heads_;
};

// Frame-wise fully connected branches, averaged over time and concatenated.
template <typename T>
class DnnBaseline final : public Model<T> {
 public:
  DnnBaseline(const DcnnCafConfig& config, uint64_t seed) : Model<T>(config) {
    const DcnnCafConfig& e = this->effective_config();
    mel_ = MakeStack("mel_branch", e.n_mels, e.dnn_widths, seed);
    rms_ = MakeStack("rms_branch", 1, e.dnn_widths, seed);
    const int width = e.dnn_widths.back();
    heads_ = JointHeads<T>(2 * width, 2 * width, e, "", seed);
    for (const char* name : {"mel_branch", "rms_branch"}) {
      for (std::size_t i = 0; i < e.dnn_widths.size(); ++i) {
        this->AddLedger(fmt::format("{}.fc{}", name, i + 1), {e.n_frames, e.dnn_widths[i]});
      }
      this->AddLedger(fmt::format("{}.repr", name), {width});
    }
    std::vector<ShapeLedgerEntry> ledger;
    AddHeadLedger(ledger, 2 * width, e, "", 0, 2 * width);
    for (auto& entry : ledger) this->AddLedger(entry.name, entry.shape);
  }

  ModelKind kind() const override { return ModelKind::kDnn; }

  ModelOutput<T> Forward(const Tensor<T>& mel, const Tensor<T>& rms, bool /*training*/) override {
    const DcnnCafConfig& e = this->effective_config();
    CheckInputShapes(mel.shape(), rms.shape(), e);
    const int batch = mel.dim(0);
    const LedgerCheck<T> check = [&](const std::string& n, const Tensor<T>& t) { this->CheckLedger(n, t, batch); };
    const Tensor<T> m = RunStack("mel_branch", mel_, ag::Reshape(mel, {batch, e.n_frames, e.n_mels}), check);
    const Tensor<T> r = RunStack("rms_branch", rms_, ag::Reshape(rms, {batch, e.n_frames, 1}), check);
    const Tensor<T> joint = ag::Concat<T>({m, r}, 1);
    ModelOutput<T> out;
    out.probs = heads_.Ssc(joint, check);
    out.annoyance = heads_.Arp(joint, check);
    return out;
  }

  ag::NamedTensors<T> Parameters() const override {
    ag::NamedTensors<T> out;
    for (std::size_t i = 0; i < mel_.size(); ++i) mel_[i].Collect(fmt::format("mel_branch.fc{}", i + 1), out);
    for (std::size_t i = 0; i < rms_.size(); ++i) rms_[i].Collect(fmt::format("rms_branch.fc{}", i + 1), out);
    heads_.Collect(out);
    return out;
  }

 private:
  static std::vector<ag::LinearLayer<T>> MakeStack(const std::string& name, int in, const std::vector<int>& widths,
                                                   uint64_t seed) {
    std::vector<ag::LinearLayer<T>> layers;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      Rng rng(MixSeed(seed, fmt::format("{}.fc{}", name, i + 1)));
      layers.emplace_back(in, widths[i], rng);
      in = widths[i];
    }
    return layers;
  }

  static Tensor<T> RunStack(const std::string& name, const std::vector<ag::LinearLayer<T>>& layers, Tensor<T> h,
                            const LedgerCheck<T>& check) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      h = ag::Relu(layers[i](h));
      check(fmt::format("{}.fc{}", name, i + 1), h);
    }
    h = ag::Mean(h, 1);
    check(name + ".repr", h);
    return h;
  }

  std::vector<ag::LinearLayer<T>> mel_;
  std::vector<ag::LinearLayer<T>> rms_;
  JointHeads<T> heads_;
};

// Transformer encoder layer: self-attention and a two-layer feed-forward
// network, each with a residual connection and layer normalization.
template <typename T>
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(const std::string& name, int d, int heads, int ffn, uint64_t seed) : name_(name) {
    Rng r1(MixSeed(seed, name + ".attention"));
    Rng r2(MixSeed(seed, name + ".ffn1"));
    Rng r3(MixSeed(seed, name + ".ffn2"));
    attention_ = ag::MultiHeadAttention<T>(d, heads, r1);
    ffn1_ = ag::LinearLayer<T>(d, ffn, r2);
    ffn2_ = ag::LinearLayer<T>(ffn, d, r3);
    norm1_ = ag::LayerNormLayer<T>(d);
    norm2_ = ag::LayerNormLayer<T>(d);
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    const Tensor<T> a = norm1_(ag::Add(x, attention_(x, x, x).output));
    return norm2_(ag::Add(a, ffn2_(ag::Relu(ffn1_(a)))));
  }

  void Collect(ag::NamedTensors<T>& out) const {
    attention_.Collect(name_ + ".attention", out);
    norm1_.Collect(name_ + ".norm1", out);
    ffn1_.Collect(name_ + ".ffn1", out);
    ffn2_.Collect(name_ + ".ffn2", out);
    norm2_.Collect(name_ + ".norm2", out);
  }

 private:
  std::string name_;
  ag::MultiHeadAttention<T> attention_;
  ag::LinearLayer<T> ffn1_;
  ag::LinearLayer<T> ffn2_;
  ag::LayerNormLayer<T> norm1_;
  ag::LayerNormLayer<T> norm2_;
};

// Convolutional branches (one conv-BN-ReLU layer and a pool per filter
// width), optionally followed by a transformer encoder over time; each branch
// is averaged into a vector and the two are concatenated.
template <typename T>
class CnnBaseline final : public Model<T> {
 public:
  CnnBaseline(ModelKind kind, const DcnnCafConfig& config, uint64_t seed) : Model<T>(config), kind_(kind) {
    const DcnnCafConfig& e = this->effective_config();
    const bool transformer = kind == ModelKind::kCnnTransformer;
    const int c = e.cnn_filters.back();
    for (int b = 0; b < 2; ++b) {
      Branch& br = branches_[b];
      br.name = b == 0 ? "mel_branch" : "rms_branch";
      int in = 1;
      int h = e.n_frames;
      int w = b == 0 ? e.n_mels : 1;
      for (std::size_t i = 0; i < e.cnn_filters.size(); ++i) {
        const std::string name = fmt::format("{}.conv{}", br.name, i + 1);
        Rng rng(MixSeed(seed, name));
        br.convs.emplace_back(in, e.cnn_filters[i], rng);
        br.pool_w.push_back(PoolWidth(e.pool_freq, w));
        h /= 2;
        w /= br.pool_w.back();
        this->AddLedger(name, {e.cnn_filters[i], h, w});
        in = e.cnn_filters[i];
      }
      if (transformer) {
        br.encoder = EncoderLayer<T>(br.name + ".encoder", c, FitHeads(e.encoder_heads, c),
                                     c * e.encoder_ffn_multiplier, seed);
        this->AddLedger(br.name + ".encoder", {h, c});
      }
      this->AddLedger(br.name + ".repr", {c});
    }
    heads_ = JointHeads<T>(2 * c, 2 * c, e, "", seed);
    std::vector<ShapeLedgerEntry> ledger;
    AddHeadLedger(ledger, 2 * c, e, "", 0, 2 * c);
    for (auto& entry : ledger) this->AddLedger(entry.name, entry.shape);
  }

  ModelKind kind() const override { return kind_; }

  ModelOutput<T> Forward(const Tensor<T>& mel, const Tensor<T>& rms, bool training) override {
    CheckInputShapes(mel.shape(), rms.shape(), this->effective_config());
    const int batch = mel.dim(0);
    const LedgerCheck<T> check = [&](const std::string& n, const Tensor<T>& t) { this->CheckLedger(n, t, batch); };
    std::vector<Tensor<T>> reprs;
    for (int b = 0; b < 2; ++b) {
      Branch& br = branches_[b];
      Tensor<T> h = b == 0 ? mel : rms;
      for (std::size_t i = 0; i < br.convs.size(); ++i) {
        h = ag::AvgPool2d(br.convs[i](h, training), 2, br.pool_w[i]);
        check(fmt::format("{}.conv{}", br.name, i + 1), h);
      }
      Tensor<T> seq = ag::Transpose(ag::Mean(h, 3), 1, 2);  // (B, T', C)
      if (kind_ == ModelKind::kCnnTransformer) {
        seq = br.encoder(seq);
        check(br.name + ".encoder", seq);
      }
      Tensor<T> v = ag::Mean(seq, 1);
      check(br.name + ".repr", v);
      reprs.push_back(v);
    }
    const Tensor<T> joint = ag::Concat<T>(reprs, 1);
    ModelOutput<T> out;
    out.probs = heads_.Ssc(joint, check);
    out.annoyance = heads_.Arp(joint, check);
    return out;
  }

  ag::NamedTensors<T> Parameters() const override {
    ag::NamedTensors<T> out;
    for (const Branch& br : branches_) {
      for (std::size_t i = 0; i < br.convs.size(); ++i) br.convs[i].Collect(fmt::format("{}.conv{}", br.name, i + 1), out);
      if (kind_ == ModelKind::kCnnTransformer) br.encoder.Collect(out);
    }
    heads_.Collect(out);
    return out;
  }

 private:
  struct Branch {
    std::string name;
    std::vector<ag::ConvBnRelu<T>> convs;
    std::vector<int> pool_w;
    EncoderLayer<T> encoder;
  };

  ModelKind kind_;
  Branch branches_[2];
  JointHeads<T> heads_;
};

}  // namespace

void CheckInputShapes(const Shape& mel, const Shape& rms, const DcnnCafConfig& e) {
  const bool mel_ok = mel.size() == 4 && mel[0] >= 1 && mel[1] == 1 && mel[2] == e.n_frames && mel[3] == e.n_mels;
  const bool rms_ok = rms.size() == 4 && rms[1] == 1 && rms[2] == e.n_frames && rms[3] == 1;
  if (!mel_ok || !rms_ok || rms[0] != mel[0]) {
    throw ShapeError(fmt::format("model input: expected mel (B, 1, {}, {}) and rms (B, 1, {}, 1), got {} and {}",
                                 e.n_frames, e.n_mels, e.n_frames, ag::ShapeToString(mel), ag::ShapeToString(rms)));
  }
}

template <typename T>
CrossAttentionOutput<T> CrossAttend(const ag::MultiHeadAttention<T>& mha1, const ag::MultiHeadAttention<T>& mha2,
                                    const Tensor<T>& r_mel, const Tensor<T>& r_rms) {
  const ag::AttentionOutput<T> a1 = mha1(r_mel, r_rms, r_rms);
  const ag::AttentionOutput<T> a2 = mha2(r_rms, r_mel, r_mel);
  return {a1.output, a2.output, a1.attention, a2.attention};
}

template <typename T>
std::vector<Tensor<T>> Model<T>::TrainableTensors() const {
  std::vector<Tensor<T>> out;
  for (const auto& nt : Parameters()) {
    if (nt.trainable) out.push_back(nt.tensor);
  }
  return out;
}

template <typename T>
std::size_t Model<T>::NumTrainableParameters() const {
  std::size_t n = 0;
  for (const auto& nt : Parameters()) {
    if (nt.trainable) n += nt.tensor.numel();
  }
  return n;
}

template <typename T>
std::size_t Model<T>::NumSscParameters() const {
  std::size_t n = 0;
  for (const auto& nt : Parameters()) {
    if (nt.trainable && (nt.name.starts_with("mel_branch.") || nt.name.starts_with("ssc."))) n += nt.tensor.numel();
  }
  return n;
}

template <typename T>
const Shape& Model<T>::LedgerShape(const std::string& name) const {
  for (const auto& entry : ledger_) {
    if (entry.name == name) return entry.shape;
  }
  throw InputError(fmt::format("shape ledger has no entry '{}'", name));
}

template <typename T>
void Model<T>::AddLedger(const std::string& name, Shape shape) {
  ledger_.push_back({name, std::move(shape)});
}

template <typename T>
void Model<T>::CheckLedger(const std::string& name, const Tensor<T>& t, int batch) const {
  Shape expected{batch};
  const Shape& per_sample = LedgerShape(name);
  expected.insert(expected.end(), per_sample.begin(), per_sample.end());
  if (t.shape() != expected) {
    throw ShapeError(fmt::format("{}: '{}' has shape {}, expected {}", ModelKindName(kind()), name,
                                 ag::ShapeToString(t.shape()), ag::ShapeToString(expected)));
  }
}

template <typename T>
std::unique_ptr<Model<T>> BuildModel(ModelKind kind, const DcnnCafConfig& config, uint64_t seed) {
  config.Validate();
  switch (kind) {
    case ModelKind::kDcnnCaf: return std::make_unique<DcnnCaf<T>>(config, seed);
    case ModelKind::kMelOnly:
    case ModelKind::kRmsOnly: return std::make_unique<SingleBranch<T>>(kind, config, seed);
    case ModelKind::kDnn: return std::make_unique<DnnBaseline<T>>(config, seed);
    case ModelKind::kCnn:
    case ModelKind::kCnnTransformer: return std::make_unique<CnnBaseline<T>>(kind, config, seed);
  }
  throw ConfigError("unknown model kind");
}

template class Model<float>;
template class Model<double>;
template std::unique_ptr<Model<float>> BuildModel<float>(ModelKind, const DcnnCafConfig&, uint64_t);
template std::unique_ptr<Model<double>> BuildModel<double>(ModelKind, const DcnnCafConfig&, uint64_t);
template CrossAttentionOutput<float> CrossAttend(const ag::MultiHeadAttention<float>&,
                                                 const ag::MultiHeadAttention<float>&, const Tensor<float>&,
                                                 const Tensor<float>&);
template CrossAttentionOutput<double> CrossAttend(const ag::MultiHeadAttention<double>&,
                                                  const ag::MultiHeadAttention<double>&, const Tensor<double>&,
                                                  const Tensor<double>&);

}  // namespace sscaf::model
