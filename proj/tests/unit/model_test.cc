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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sscaf/autograd/grad_check.h"
#include "sscaf/autograd/ops.h"
#include "sscaf/common/error.h"
#include "sscaf/model/config.h"
#include "sscaf/model/model.h"
#include "grad_cases.h"
#include "test_util.h"

namespace sscaf::model {
namespace {

using ag::Shape;
using ag::Tensor;
using sscaf::testing::RandomTensor;

template <typename T>
struct Inputs {
  Tensor<T> mel;
  Tensor<T> rms;
};

template <typename T>
Inputs<T> RandomInputs(const DcnnCafConfig& config, int batch, uint64_t seed) {
  const DcnnCafConfig e = config.Effective();
  Rng rng(seed);
  Inputs<T> in{RandomTensor<T>({batch, 1, e.n_frames, e.n_mels}, rng, false),
               RandomTensor<T>({batch, 1, e.n_frames, 1}, rng, false, 0.3)};
  for (T& v : in.rms.mutable_data()) v = std::abs(v);
  return in;
}

// Tiny widths on a reduced input plane, small enough for exhaustive-ish
// finite differences.
DcnnCafConfig GradCheckConfig() {
  DcnnCafConfig c = DcnnCafConfig::Tiny();
  c.n_frames = 32;
  c.n_mels = 16;
  return c;
}

TEST(ModelConfigTest, TinyScalesEveryWidth) {
  const DcnnCafConfig e = DcnnCafConfig::Tiny().Effective();
  EXPECT_EQ(e.conv_filters, (std::vector<int>{4, 8, 16, 32}));
  EXPECT_EQ(e.d_model, 32);
  EXPECT_EQ(e.heads, 8);
  EXPECT_EQ(e.embedding_dim, 8);
  EXPECT_EQ(e.fusion_dim, 32);
  EXPECT_EQ(e.dnn_widths, (std::vector<int>{4, 8, 16, 32}));
  EXPECT_EQ(e.cnn_filters, (std::vector<int>{2, 4}));
  EXPECT_FALSE(e.tiny);
}

TEST(ModelConfigTest, InvalidConfigurationsAreRejected) {
  DcnnCafConfig c;
  c.heads = 7;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = DcnnCafConfig();
  c.d_model = 256;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = DcnnCafConfig();
  c.n_frames = 470;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = DcnnCafConfig();
  c.conv_filters.clear();
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(ParseModelKind("resnet"), ConfigError);
}

TEST(ModelConfigTest, KeyValueRoundTripAndKindNames) {
  DcnnCafConfig c = DcnnCafConfig::Tiny();
  c.pool_freq = false;
  c.embedding_dim = 64;
  KeyValueConfig kv;
  c.ToKeyValue(kv);
  EXPECT_EQ(DcnnCafConfig::FromKeyValue(kv), c);
  for (const auto kind : {ModelKind::kDcnnCaf, ModelKind::kMelOnly, ModelKind::kRmsOnly, ModelKind::kDnn,
                          ModelKind::kCnn, ModelKind::kCnnTransformer}) {
    EXPECT_EQ(ParseModelKind(ModelKindName(kind)), kind);
  }
}

TEST(ModelShapeTest, DefaultConfigLedgerAndForward) {
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig(), 1);
  EXPECT_EQ(model->LedgerShape("mel_branch.repr"), (Shape{30, 512}));
  EXPECT_EQ(model->LedgerShape("rms_branch.repr"), (Shape{30, 512}));
  EXPECT_EQ(model->LedgerShape("mha1.attention"), (Shape{8, 30, 30}));
  EXPECT_EQ(model->LedgerShape("mha2.attention"), (Shape{8, 30, 30}));
  EXPECT_EQ(model->LedgerShape("rms_branch.block4"), (Shape{512, 30, 1}));

  const auto in = RandomInputs<float>(DcnnCafConfig(), 1, 2);
  const auto out = model->Forward(in.mel, in.rms, false);
  EXPECT_EQ(out.r_mel.shape(), (Shape{1, 30, 512}));
  EXPECT_EQ(out.r_rms.shape(), (Shape{1, 30, 512}));
  EXPECT_EQ(out.attention1.shape(), (Shape{1, 8, 30, 30}));
  EXPECT_EQ(out.attention2.shape(), (Shape{1, 8, 30, 30}));
  EXPECT_EQ(out.probs.shape(), (Shape{1, 24}));
  EXPECT_EQ(out.annoyance.shape(), (Shape{1}));
}

TEST(ModelShapeTest, TimeOnlyPoolingKeepsTheSameRepresentationShape) {
  DcnnCafConfig c = DcnnCafConfig::Tiny();
  c.pool_freq = false;
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, c, 1);
  EXPECT_EQ(model->LedgerShape("mel_branch.block4"), (Shape{32, 30, 64}));
  EXPECT_EQ(model->LedgerShape("mel_branch.repr"), (Shape{30, 32}));
  const auto in = RandomInputs<float>(c, 2, 3);
  EXPECT_EQ(model->Forward(in.mel, in.rms, true).r_mel.shape(), (Shape{2, 30, 32}));
}

TEST(ModelShapeTest, TinyConfigShapes) {
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 1);
  const auto in = RandomInputs<float>(DcnnCafConfig::Tiny(), 3, 2);
  const auto out = model->Forward(in.mel, in.rms, true);
  EXPECT_EQ(out.r_mel.shape(), (Shape{3, 30, 32}));
  EXPECT_EQ(out.r_rms.shape(), (Shape{3, 30, 32}));
  EXPECT_EQ(out.attention1.shape(), (Shape{3, 8, 30, 30}));
  EXPECT_EQ(out.probs.shape(), (Shape{3, 24}));
  EXPECT_EQ(out.annoyance.shape(), (Shape{3}));
}

TEST(ModelShapeTest, WrongInputShapeIsRejected) {
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 1);
  Rng rng(0);
  const auto mel = RandomTensor<float>({1, 1, 480, 60}, rng, false);
  const auto rms = RandomTensor<float>({1, 1, 480, 1}, rng, false);
  EXPECT_THROW(model->Forward(mel, rms, false), ShapeError);
  const auto mel_ok = RandomTensor<float>({2, 1, 480, 64}, rng, false);
  EXPECT_THROW(model->Forward(mel_ok, rms, false), ShapeError);
}

TEST(ModelTest, SameSeedGivesBitwiseIdenticalParameters) {
  for (const auto kind : {ModelKind::kDcnnCaf, ModelKind::kMelOnly, ModelKind::kCnnTransformer}) {
    auto a = BuildModel<float>(kind, DcnnCafConfig::Tiny(), 42);
    auto b = BuildModel<float>(kind, DcnnCafConfig::Tiny(), 42);
    auto c = BuildModel<float>(kind, DcnnCafConfig::Tiny(), 43);
    const auto pa = a->Parameters();
    const auto pb = b->Parameters();
    const auto pc = c->Parameters();
    ASSERT_EQ(pa.size(), pb.size());
    bool any_difference = false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      EXPECT_EQ(pa[i].name, pb[i].name);
      EXPECT_EQ(pa[i].tensor.vec(), pb[i].tensor.vec()) << pa[i].name;
      any_difference |= pa[i].tensor.vec() != pc[i].tensor.vec();
    }
    EXPECT_TRUE(any_difference);
  }
}

TEST(ModelTest, InitializationFollowsTheStatedScheme) {
  auto model = BuildModel<double>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 5);
  for (const auto& nt : model->Parameters()) {
    const auto d = nt.tensor.data();
    if (nt.name.ends_with(".bias") || nt.name.ends_with(".beta") || nt.name.ends_with(".running_mean")) {
      for (double v : d) EXPECT_EQ(v, 0.0) << nt.name;
    } else if (nt.name.ends_with(".gamma") || nt.name.ends_with(".running_var")) {
      for (double v : d) EXPECT_EQ(v, 1.0) << nt.name;
    } else {
      // Kaiming-uniform: fan_in is the product of all but the output axis.
      const Shape& s = nt.tensor.shape();
      const int fan_in = s.size() == 4 ? s[1] * s[2] * s[3] : s[0];
      const double bound = std::sqrt(6.0 / fan_in);
      for (double v : d) EXPECT_LE(std::abs(v), bound) << nt.name;
    }
  }
}

TEST(ModelTest, InferenceIsDeterministicAndProbabilitiesInOpenInterval) {
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 3);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto in = RandomInputs<float>(DcnnCafConfig::Tiny(), 1, seed);
    const auto a = model->Forward(in.mel, in.rms, false);
    if (seed < 5) {
      const auto b = model->Forward(in.mel, in.rms, false);
      EXPECT_EQ(a.probs.vec(), b.probs.vec());
      EXPECT_EQ(a.annoyance.vec(), b.annoyance.vec());
    }
    for (float p : a.probs.data()) {
      EXPECT_GT(p, 0.0f);
      EXPECT_LT(p, 1.0f);
    }
  }
}

TEST(ModelTest, ZeroFinalLayersGiveHalfProbabilityAndZeroAnnoyance) {
  for (const auto kind : {ModelKind::kDcnnCaf, ModelKind::kMelOnly, ModelKind::kRmsOnly, ModelKind::kDnn,
                          ModelKind::kCnn, ModelKind::kCnnTransformer}) {
    auto model = BuildModel<float>(kind, DcnnCafConfig::Tiny(), 9);
    for (auto& nt : model->Parameters()) {
      if (nt.name.starts_with("ssc.classifier.") || nt.name.starts_with("arp.output.")) {
        for (float& v : nt.tensor.mutable_data()) v = 0.0f;
      }
    }
    const auto in = RandomInputs<float>(DcnnCafConfig::Tiny(), 2, 4);
    const auto out = model->Forward(in.mel, in.rms, false);
    for (float p : out.probs.data()) EXPECT_EQ(p, 0.5f) << ModelKindName(kind);
    for (float y : out.annoyance.data()) EXPECT_EQ(y, 0.0f) << ModelKindName(kind);
  }
}

TEST(ModelTest, AttentionRowsSumToOne) {
  auto model = BuildModel<double>(ModelKind::kDcnnCaf, DcnnCafConfig::Tiny(), 11);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto in = RandomInputs<double>(DcnnCafConfig::Tiny(), 2, seed);
    const auto out = model->Forward(in.mel, in.rms, seed % 2 == 0);
    for (const auto* att : {&out.attention1, &out.attention2}) {
      const auto d = att->data();
      const int cols = att->dim(-1);
      for (std::size_t row = 0; row < d.size() / cols; ++row) {
        double sum = 0.0;
        for (int j = 0; j < cols; ++j) sum += d[row * cols + j];
        EXPECT_NEAR(sum, 1.0, 1e-6);
      }
    }
  }
}

TEST(ModelTest, SwappingInputsAndAttentionWeightsSwapsOutputs) {
  Rng rng(17);
  ag::MultiHeadAttention<double> m1(16, 4, rng);
  ag::MultiHeadAttention<double> m2(16, 4, rng);
  const auto x = RandomTensor<double>({2, 30, 16}, rng, false);
  const auto y = RandomTensor<double>({2, 30, 16}, rng, false);
  const auto a = CrossAttend(m1, m2, x, y);
  const auto b = CrossAttend(m2, m1, y, x);
  EXPECT_EQ(a.out_mel.vec(), b.out_rms.vec());
  EXPECT_EQ(a.out_rms.vec(), b.out_mel.vec());
  EXPECT_EQ(a.attention1.vec(), b.attention2.vec());
  // Identical inputs: both blocks are self-attention and differ only by weights.
  const auto s = CrossAttend(m1, m2, x, x);
  EXPECT_NE(s.out_mel.vec(), s.out_rms.vec());
  const auto t = CrossAttend(m1, m1, x, x);
  EXPECT_EQ(t.out_mel.vec(), t.out_rms.vec());
}

TEST(ModelTest, AblationsDropTheOtherBranchAndTheFusion) {
  const DcnnCafConfig c = DcnnCafConfig::Tiny();
  auto full = BuildModel<float>(ModelKind::kDcnnCaf, c, 1);
  auto mel = BuildModel<float>(ModelKind::kMelOnly, c, 1);
  auto rms = BuildModel<float>(ModelKind::kRmsOnly, c, 1);
  EXPECT_LT(mel->NumTrainableParameters(), full->NumTrainableParameters());
  EXPECT_LT(rms->NumTrainableParameters(), full->NumTrainableParameters());
  for (const auto& nt : mel->Parameters()) {
    EXPECT_FALSE(nt.name.starts_with("rms_branch.") || nt.name.starts_with("mha")) << nt.name;
  }
  for (const auto& nt : rms->Parameters()) EXPECT_FALSE(nt.name.starts_with("mel_branch.")) << nt.name;
  // Sub-modules keyed by name start from the same weights across kinds.
  const auto pf = full->Parameters();
  const auto pm = mel->Parameters();
  EXPECT_EQ(pf[0].name, pm[0].name);
  EXPECT_EQ(pf[0].tensor.vec(), pm[0].tensor.vec());
  EXPECT_THROW(mel->LedgerShape("mha1.attention"), InputError);
}

TEST(ModelTest, RmsOnlyOnConstantInputGivesTimeInvariantRepresentation) {
  auto model = BuildModel<double>(ModelKind::kRmsOnly, DcnnCafConfig::Tiny(), 2);
  auto in = RandomInputs<double>(DcnnCafConfig::Tiny(), 2, 1);
  for (double& v : in.rms.mutable_data()) v = 0.125;
  const auto out = model->Forward(in.mel, in.rms, false);
  const int steps = out.r_rms.dim(1);
  const int d = out.r_rms.dim(2);
  const auto r = out.r_rms.data();
  // Zero padding only reaches the two outermost steps at each end.
  for (int t = 2; t < steps - 2; ++t) {
    for (int k = 0; k < d; ++k) EXPECT_NEAR(r[t * d + k], r[2 * d + k], 1e-12);
  }
  // Same constant input gives the same pooled output for every sample.
  for (int k = 0; k < steps * d; ++k) EXPECT_EQ(r[k], r[steps * d + k]);
  EXPECT_EQ(out.annoyance.data()[0], out.annoyance.data()[1]);
}

TEST(ModelTest, BaselineWidthsMatchTheirDescriptions) {
  const DcnnCafConfig c;
  auto dnn = BuildModel<float>(ModelKind::kDnn, c, 1);
  EXPECT_EQ(dnn->LedgerShape("mel_branch.fc1"), (Shape{480, 64}));
  EXPECT_EQ(dnn->LedgerShape("mel_branch.fc2"), (Shape{480, 128}));
  EXPECT_EQ(dnn->LedgerShape("mel_branch.fc3"), (Shape{480, 256}));
  EXPECT_EQ(dnn->LedgerShape("mel_branch.fc4"), (Shape{480, 512}));
  EXPECT_EQ(dnn->LedgerShape("rms_branch.fc4"), (Shape{480, 512}));
  auto cnn = BuildModel<float>(ModelKind::kCnn, c, 1);
  EXPECT_EQ(cnn->LedgerShape("mel_branch.conv1")[0], 32);
  EXPECT_EQ(cnn->LedgerShape("mel_branch.conv2")[0], 64);
  EXPECT_THROW(cnn->LedgerShape("mel_branch.conv3"), InputError);
  auto ct = BuildModel<float>(ModelKind::kCnnTransformer, c, 1);
  EXPECT_EQ(ct->LedgerShape("mel_branch.conv2")[0], 64);
  EXPECT_EQ(ct->LedgerShape("mel_branch.encoder"), (Shape{120, 64}));
  for (auto* m : {dnn.get(), cnn.get(), ct.get()}) {
    const auto in = RandomInputs<float>(c, 1, 2);
    const auto out = m->Forward(in.mel, in.rms, false);
    EXPECT_EQ(out.probs.shape(), (Shape{1, 24}));
    EXPECT_EQ(out.annoyance.shape(), (Shape{1}));
  }
}

TEST(ModelTest, SscBranchParameterCountIsPinned) {
  auto model = BuildModel<float>(ModelKind::kDcnnCaf, DcnnCafConfig(), 1);
  // Mel branch (8 conv layers + batch norms) plus embedding and classifier:
  // the same order of magnitude as a published 4.961 M classification branch.
  const std::size_t n = model->NumSscParameters();
  EXPECT_EQ(n, 4754904u);
  EXPECT_GT(n, 4961000u / 2);
  EXPECT_LT(n, 4961000u * 2);
}

class ModelGradientTest : public ::testing::TestWithParam<ModelKind> {};

TEST_P(ModelGradientTest, MatchesFiniteDifferences) {
  const auto report = testing::ModelGradCheck(GetParam(), GradCheckConfig(), 2, 24, 21);
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst_tensor << "[" << report.worst_index
                                        << "] analytic=" << report.worst_analytic
                                        << " numeric=" << report.worst_numeric;
  EXPECT_GT(report.checked, 100u);
  EXPECT_LE(report.kink_skipped, (report.checked + report.kink_skipped) / 100);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, ModelGradientTest,
                         ::testing::Values(ModelKind::kDcnnCaf, ModelKind::kMelOnly, ModelKind::kRmsOnly,
                                           ModelKind::kDnn, ModelKind::kCnn, ModelKind::kCnnTransformer),
                         [](const auto& info) {
                           std::string name = ModelKindName(info.param);
                           std::erase(name, '-');
                           return name;
                         });

}  // namespace
}  // namespace sscaf::model
