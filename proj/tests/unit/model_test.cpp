// Copyright 2026 The Admatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "admatch/common/error.hpp"
#include "admatch/model/checkpoint.hpp"
#include "admatch/model/heads.hpp"
#include "admatch/model/model.hpp"
#include "admatch/numkit/ops.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace admatch::model {
namespace {

using testing::small_corpus;
using testing::tiny_config;

std::vector<const ImpressionInstance*> batch_of(std::size_t n, std::size_t stride = 7) {
  const auto& inst = small_corpus().instances;
  std::vector<const ImpressionInstance*> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back(&inst[(10 + i * stride) % inst.size()]);
  return b;
}

// Random point in parameter space, pad rows zero.
ParamStore randomized(const Model& m, std::uint64_t seed, double scale = 0.5) {
  ParamStore p = m.init_params(seed);
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& [name, param] : p)
    for (double& v : param.value.data()) v = u(g);
  p.zero_pad_rows();
  return p;
}

double loss_value(const Model& m, const ParamStore& p, LossKind kind,
                  std::span<const ImpressionInstance* const> batch) {
  Tape tape(p);
  return m.loss(tape, batch, kind).value()[0];
}

TEST(EmbedItem, TitleSlotSumsTermRows) {
  const Model m(tiny_config(small_corpus().vocab));
  const ParamStore p = m.init_params(1);
  AdItem ad{3, 2, 1, {4, 7}};
  const Tensor e = m.embed_item(p, ad);
  const auto& terms = p.at("embedding/term_id").value;
  const std::size_t w = m.config().embedding_dim;
  for (std::size_t j = 0; j < w; ++j) EXPECT_EQ(e[3 * w + j], terms(4, j) + terms(7, j));
}

TEST(EmbedItem, PadItemIsZero) {
  const Model m(tiny_config(small_corpus().vocab));
  const ParamStore p = m.init_params(1);
  const Tensor e = m.embed_item(p, BehaviorItem{});
  for (double v : e.data()) EXPECT_EQ(v, 0.0);
}

TEST(EmbedItem, MatchesRowSumOracle) {
  const Model m(tiny_config(small_corpus().vocab));
  const ParamStore p = m.init_params(2);
  const oracle::ScalarModel ref(m.config(), p);
  for (const auto* inst : batch_of(20)) {
    for (const auto& b : inst->request.behaviors) {
      const Tensor e = m.embed_item(p, b);
      const auto want = ref.behavior(b);
      ASSERT_EQ(e.size(), want.size());
      for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(e[j], want[j], 1e-15);
    }
  }
}

TEST(EmbedItem, OutOfRangeIdNamesSpace) {
  const Model m(tiny_config(small_corpus().vocab));
  const ParamStore p = m.init_params(1);
  AdItem ad{0, 0, 99999, {}};
  try {
    m.ad_vector(p, ad);
    FAIL();
  } catch (const VocabularyError& e) {
    EXPECT_NE(std::string(e.what()).find("brand_id"), std::string::npos) << e.what();
  }
}

QueryRequest repeated_request(const BehaviorItem& b, std::size_t window) {
  QueryRequest r;
  r.query_term_ids = {1, 2};
  r.behaviors.assign(window, b);
  return r;
}

TEST(EncodeBehaviors, IdenticalBehaviorsPoolToTheItem) {
  const auto& vocab = small_corpus().vocab;
  const BehaviorItem b = small_corpus().instances[40].request.behaviors.back();
  for (EncoderVariant v : {EncoderVariant::kDnn, EncoderVariant::kAttentionDnn}) {
    const Model m(tiny_config(vocab, v));
    const ParamStore p = randomized(m, 3);
    const Tensor h = m.encode_behaviors(p, repeated_request(b, 6));
    const Tensor e = m.embed_item(p, b);
    for (std::size_t j = 0; j < e.size(); ++j) EXPECT_NEAR(h[j], e[j], 1e-12) << variant_name(v);
  }
}

TEST(EncodeBehaviors, DnnIsTheMeanOfSlots) {
  const Model m(tiny_config(small_corpus().vocab, EncoderVariant::kDnn));
  const ParamStore p = randomized(m, 4);
  const auto& r = batch_of(1).front()->request;
  const Tensor h = m.encode_behaviors(p, r);
  std::vector<double> mean(h.size(), 0.0);
  for (const auto& b : r.behaviors) {
    const Tensor e = m.embed_item(p, b);
    for (std::size_t j = 0; j < e.size(); ++j) mean[j] += e[j] / 6.0;
  }
  for (std::size_t j = 0; j < h.size(); ++j) EXPECT_NEAR(h[j], mean[j], 1e-12);
}

TEST(EncodeBehaviors, TwoStepAttentiveGruMatchesHandUnrolledOracle) {
  EncoderConfig c = tiny_config(small_corpus().vocab, EncoderVariant::kAttentionGruRnn);
  c.window = 2;
  const Model m(c);
  const ParamStore p = randomized(m, 5);
  QueryRequest r;
  r.query_term_ids = {3};
  r.behaviors = {BehaviorItem{1, 1, 1, {2}, {3}}, BehaviorItem{2, 2, 2, {4, 5}, {}}};
  const Tensor h = m.encode_behaviors(p, r);
  const auto want = oracle::ScalarModel(c, p).encode(r);
  ASSERT_EQ(h.size(), want.size());
  for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(h[j], want[j], 1e-12);
}

TEST(Model, EveryVariantMatchesScalarForwardOracle) {
  for (EncoderVariant v : kAllVariants) {
    for (bool share : {true, false}) {
      const EncoderConfig c = tiny_config(small_corpus().vocab, v, share);
      const Model m(c);
      const ParamStore p = randomized(m, 6);
      const oracle::ScalarModel ref(c, p);
      for (const auto* inst : batch_of(5)) {
        const auto qu = m.qu_vector(p, inst->request);
        const auto ad = m.ad_vector(p, inst->ad);
        const auto want_qu = ref.qu(inst->request);
        const auto want_ad = ref.ad(inst->ad);
        for (std::size_t j = 0; j < qu.size(); ++j) EXPECT_NEAR(qu[j], want_qu[j], 1e-12) << variant_name(v);
        for (std::size_t j = 0; j < ad.size(); ++j) EXPECT_NEAR(ad[j], want_ad[j], 1e-12) << variant_name(v);
        EXPECT_NEAR(retrieval_prob(qu, ad, c.gamma), ref.retrieval(want_qu, want_ad), 1e-12);
        EXPECT_NEAR(m.prerank_prob(p, qu, ad), ref.prerank(want_qu, want_ad), 1e-12);
      }
    }
  }
}

TEST(Attention, IdenticalStatesGetUniformWeights) {
  const auto& vocab = small_corpus().vocab;
  const BehaviorItem b{1, 1, 1, {2}, {}};
  const Model m(tiny_config(vocab, EncoderVariant::kAttentionDnn));
  const ParamStore p = randomized(m, 7);
  for (double w : m.attention_weights(p, repeated_request(b, 6))) EXPECT_NEAR(w, 1.0 / 6.0, 1e-15);
}

TEST(Attention, WeightsSumToOneAndPoolIsConvex) {
  for (EncoderVariant v : {EncoderVariant::kAttentionDnn, EncoderVariant::kAttentionGruRnn}) {
    const Model m(tiny_config(small_corpus().vocab, v));
    const ParamStore p = randomized(m, 8, 1.0);
    for (const auto* inst : batch_of(30, 3)) {
      const auto w = m.attention_weights(p, inst->request);
      double sum = 0.0;
      for (double x : w) {
        EXPECT_GE(x, 0.0);
        sum += x;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      // The states being pooled: embeddings, or the oracle's GRU states.
      const oracle::ScalarModel ref(m.config(), p);
      std::vector<std::vector<double>> xs;
      for (const auto& b : inst->request.behaviors) xs.push_back(ref.behavior(b));
      const auto states = v == EncoderVariant::kAttentionDnn ? xs : ref.gru(xs);
      const Tensor h = m.encode_behaviors(p, inst->request);
      for (std::size_t j = 0; j < h.size(); ++j) {
        double lo = states[0][j], hi = states[0][j];
        for (const auto& s : states) {
          lo = std::min(lo, s[j]);
          hi = std::max(hi, s[j]);
        }
        EXPECT_GE(h[j], lo - 1e-12);
        EXPECT_LE(h[j], hi + 1e-12);
      }
    }
  }
}

TEST(Attention, ShiftOfAllLogitsLeavesWeightsUnchanged) {
  // The attention logits enter a row softmax; shifting every logit by c is
  // the same as adding c to the softmax input.
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(-3, 3);
  numkit::Tensor logits = numkit::Tensor::matrix(1, 6);
  for (double& x : logits.data()) x = u(g);
  const auto a = numkit::softmax_rows(logits);
  for (double& x : logits.data()) x += 7.5;
  const auto b = numkit::softmax_rows(logits);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(QuForward, DeterministicWithDefaultOutputWidth) {
  EncoderConfig c;
  c.vocab_sizes = small_corpus().vocab.sizes();
  const Model m(c);
  const ParamStore p = m.init_params(9);
  const auto& r = batch_of(1).front()->request;
  const auto a = m.qu_vector(p, r), b = m.qu_vector(p, r);
  EXPECT_EQ(a.size(), 128u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(m.ad_vector(p, batch_of(1).front()->ad).size(), 128u);
}

TEST(QuForward, ZeroTowerGivesZeroVectorAndDegenerateCosine) {
  EncoderConfig c = tiny_config(small_corpus().vocab);
  c.activation = Activation::kRelu;
  const Model m(c);
  ParamStore p = randomized(m, 10);
  for (const auto& name : m.tower_param_names(Tower::kQuery)) p.at(name).value.fill(0.0);
  const auto* inst = batch_of(1).front();
  const auto qu = m.qu_vector(p, inst->request);
  for (double v : qu) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(retrieval_prob(qu, m.ad_vector(p, inst->ad), c.gamma), DegenerateVectorError);
}

TEST(Towers, SharedTowerUsesOneSetOfParameters) {
  const Model shared(tiny_config(small_corpus().vocab, EncoderVariant::kDnn, true));
  EXPECT_EQ(shared.tower_param_names(Tower::kQuery), shared.tower_param_names(Tower::kAd));
  const ParamStore p = shared.init_params(1);
  EXPECT_FALSE(p.contains("qu_tower/layer1/W"));

  const Model split(tiny_config(small_corpus().vocab, EncoderVariant::kDnn, false));
  const auto q = split.tower_param_names(Tower::kQuery), a = split.tower_param_names(Tower::kAd);
  EXPECT_NE(q, a);
  const ParamStore s = split.init_params(1);
  EXPECT_NE(s.at(q[0]).value, s.at(a[0]).value);
}

TEST(Towers, OneTermTableFeedsBothTowers) {
  const Model m(tiny_config(small_corpus().vocab));
  ParamStore p = randomized(m, 11);
  const auto batch = batch_of(4);
  Tape tape(p);
  std::vector<const AdItem*> ads;
  for (const auto* i : batch) ads.push_back(&i->ad);
  tape.backward(numkit::sum_all(m.ad_forward(tape, ads)));
  p.zero_grad();
  tape.accumulate_into(p);
  double ad_side = 0.0;
  for (double g : p.at("embedding/term_id").grad.data()) ad_side += std::abs(g);
  EXPECT_GT(ad_side, 0.0);

  Tape tq(p);
  std::vector<const QueryRequest*> reqs;
  for (const auto* i : batch) reqs.push_back(&i->request);
  tq.backward(numkit::sum_all(m.qu_forward(tq, reqs)));
  p.zero_grad();
  tq.accumulate_into(p);
  double qu_side = 0.0;
  for (double g : p.at("embedding/term_id").grad.data()) qu_side += std::abs(g);
  EXPECT_GT(qu_side, 0.0);
}

TEST(RetrievalHead, KnownValues) {
  for (double gamma : {1.0, 3.0, 6.0, 9.0}) EXPECT_EQ(retrieval_prob_from_cosine(0.0, gamma), 0.5);
  EXPECT_NEAR(retrieval_prob_from_cosine(1.0, 6.0), 0.9975274, 5e-8);
  EXPECT_NEAR(retrieval_prob_from_cosine(-1.0, 6.0), 0.0024726, 5e-8);
  EXPECT_NEAR(retrieval_prob_from_cosine(-1.0, 6.0), 1.0 - retrieval_prob_from_cosine(1.0, 6.0), 1e-15);
}

TEST(RetrievalHead, StrictlyIncreasingInCosine) {
  for (double gamma : {0.5, 1.0, 6.0}) {
    double prev = retrieval_prob_from_cosine(-1.0, gamma);
    for (int i = -99; i <= 100; ++i) {
      const double p = retrieval_prob_from_cosine(i / 100.0, gamma);
      EXPECT_GT(p, prev);
      prev = p;
    }
  }
}

TEST(Losses, HalfProbabilityCostsLnTwo) {
  const std::vector<double> p = {0.5}, y = {1};
  EXPECT_NEAR(bce_loss(p, y), std::log(2.0), 1e-15);
  EXPECT_NEAR(std::log(2.0), 0.693147, 1e-6);
}

TEST(Losses, PerfectBatchApproachesZero) {
  const std::vector<double> p = {1.0, 0.0, 1.0 - 1e-13}, y = {1, 0, 1};
  EXPECT_LT(bce_loss(p, y), 1e-6);
  // The same limit through the recorded loss on clipped logits.
  numkit::ParamStore s;
  s.add("z", numkit::Tensor::from_rows({{100.0}, {-100.0}}));
  Tape t(s);
  const std::vector<double> yy = {1, 0};
  EXPECT_LT(numkit::bce_logits_mean(t.param("z"), yy).value()[0], 1e-6);
}

TEST(Losses, BatchLossesMatchScalarOracle) {
  for (EncoderVariant v : {EncoderVariant::kDnn, EncoderVariant::kAttentionGruRnn}) {
    const EncoderConfig c = tiny_config(small_corpus().vocab, v);
    const Model m(c);
    const ParamStore p = randomized(m, 12);
    const oracle::ScalarModel ref(c, p);
    const auto batch = batch_of(8);
    std::vector<double> pv, pr, y;
    for (const auto* i : batch) {
      const auto qu = ref.qu(i->request), ad = ref.ad(i->ad);
      pv.push_back(ref.retrieval(qu, ad));
      pr.push_back(ref.prerank(qu, ad));
      y.push_back(i->label);
    }
    EXPECT_NEAR(loss_value(m, p, LossKind::kRetrieval, batch), oracle::scalar_bce(pv, y), 1e-12);
    EXPECT_NEAR(loss_value(m, p, LossKind::kPrerank, batch), oracle::scalar_bce(pr, y), 1e-12);
  }
}

TEST(Losses, JointLossBlendsTheTasks) {
  EncoderConfig c = tiny_config(small_corpus().vocab);
  const auto batch = batch_of(6);
  c.alpha = 0.5;
  const Model half(c);
  const ParamStore p = randomized(half, 13);
  const double cv = loss_value(half, p, LossKind::kRetrieval, batch);
  const double cr = loss_value(half, p, LossKind::kPrerank, batch);
  EXPECT_NEAR(loss_value(half, p, LossKind::kJoint, batch), 0.5 * (cv + cr), 1e-12);
  c.alpha = 1.0;
  EXPECT_NEAR(loss_value(Model(c), p, LossKind::kJoint, batch), cv, 1e-12);
  c.alpha = 0.0;
  EXPECT_NEAR(loss_value(Model(c), p, LossKind::kJoint, batch), cr, 1e-12);
}

TEST(PrerankHead, ZeroLogitWeightsGiveSigmoidOfBias) {
  const Model m(tiny_config(small_corpus().vocab));
  ParamStore p = randomized(m, 14);
  p.at("prerank/out/W").value.fill(0.0);
  const double bias = p.at("prerank/out/b").value[0];
  const auto* inst = batch_of(1).front();
  const auto qu = m.qu_vector(p, inst->request), ad = m.ad_vector(p, inst->ad);
  EXPECT_EQ(m.prerank_prob(p, qu, ad), numkit::sigmoid(bias));
  EXPECT_EQ(m.prerank_prob(p, qu, ad), m.prerank_prob(p, qu, ad));
}

TEST(PrerankHead, SplitPathMatchesDirect) {
  const Model m(tiny_config(small_corpus().vocab));
  const ParamStore p = randomized(m, 15);
  const PrerankHead head = m.prerank_head(p);
  for (const auto* inst : batch_of(40, 5)) {
    const auto qu = m.qu_vector(p, inst->request), ad = m.ad_vector(p, inst->ad);
    const auto split = prerank_split(qu, ad, head.weight, head.bias);
    EXPECT_NEAR(prerank_prob_split(head, split.query_part, split.ad_part),
                prerank_prob_direct(head, qu, ad), 1e-9);
    EXPECT_NEAR(prerank_prob_direct(head, qu, ad), m.prerank_prob(p, qu, ad), 1e-12);
  }
}

TEST(PrerankSplit, RecombinesToDirectProduct) {
  std::mt19937_64 g(16);
  std::normal_distribution<double> n;
  const std::size_t d = 8, r = 5;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> u(d), v(d), b(r);
    numkit::Tensor w = numkit::Tensor::matrix(2 * d, r);
    for (auto& x : u) x = n(g);
    for (auto& x : v) x = n(g);
    for (auto& x : b) x = n(g);
    for (double& x : w.data()) x = n(g);
    const auto s = prerank_split(u, v, w, b);
    const auto direct = prerank_preactivation(u, v, w, b);
    for (std::size_t j = 0; j < r; ++j) {
      worst = std::max(worst, std::abs(s.recombined[j] - direct[j]));
      EXPECT_EQ(s.recombined[j], s.query_part[j] + s.ad_part[j]);
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(PrerankSplit, ZeroAdVectorHasZeroPart) {
  numkit::Tensor w = numkit::Tensor::matrix(4, 3, 0.7);
  const std::vector<double> zero(2, 0.0);
  for (double x : ad_part(zero, w)) EXPECT_EQ(x, 0.0);
}

TEST(Checkpoint, RoundTripsBitExactly) {
  testing::TempDir dir("ckpt");
  const EncoderConfig c = tiny_config(small_corpus().vocab, EncoderVariant::kGruRnn, false);
  const Model m(c);
  const ParamStore p = randomized(m, 17);
  save_checkpoint(dir / "m.ckpt", c, p);
  const Checkpoint back = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.config, c);
  EXPECT_TRUE(back.params.same_values(p));
}

TEST(Checkpoint, RejectsForeignFile) {
  testing::TempDir dir("ckpt_bad");
  std::ofstream(dir / "x") << "not a checkpoint";
  EXPECT_THROW(load_checkpoint(dir / "x"), FormatError);
}

TEST(Config, RejectsInvalidValues) {
  EncoderConfig c;
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.alpha = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_variant("LSTM"), ConfigError);
  for (EncoderVariant v : kAllVariants) EXPECT_EQ(parse_variant(variant_name(v)), v);
}

TEST(Init, PadRowsZeroAndSeedReproducible) {
  const Model m(tiny_config(small_corpus().vocab));
  const ParamStore a = m.init_params(5), b = m.init_params(5), c = m.init_params(6);
  EXPECT_TRUE(a.same_values(b));
  EXPECT_FALSE(a.same_values(c));
  for (IdSpace s : kAllSpaces) {
    for (double v : a.at(Model::embedding_name(s)).value.row(0)) EXPECT_EQ(v, 0.0);
  }
}

}  // namespace
}  // namespace admatch::model
