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
#include <limits>
#include <sstream>

#include "admatch/common/error.hpp"
#include "admatch/dataio/split.hpp"
#include "admatch/evaluator/metrics.hpp"
#include "admatch/model/model.hpp"
#include "admatch/numkit/ops.hpp"
#include "admatch/trainer/adam.hpp"
#include "admatch/trainer/trainer.hpp"
#include "fixtures.hpp"

namespace admatch::trainer {
namespace {

using model::EncoderVariant;
using model::ImpressionInstance;
using model::LossKind;
using model::Model;
using numkit::ParamStore;
using numkit::Tensor;
using testing::small_corpus;
using testing::tiny_config;

std::span<const ImpressionInstance> first(std::size_t n) {
  return std::span(small_corpus().instances).first(n);
}

double batch_loss(const Model& m, const ParamStore& p, const ImpressionInstance& inst, LossKind k) {
  numkit::Tape tape(p);
  const ImpressionInstance* b[] = {&inst};
  return m.loss(tape, b, k).value()[0];
}

TEST(Adam, ZeroGradientLeavesValuesUnchanged) {
  ParamStore p;
  p.add("w", Tensor::from_rows({{0.5, -1.0}}));
  const ParamStore before = p;
  Adam adam;
  adam.step(p);
  EXPECT_TRUE(p.same_values(before));
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, QuadraticBowlConverges) {
  ParamStore p;
  p.add("x", Tensor::from_rows({{1.0, -2.0, 0.5}}));
  Adam adam({.learning_rate = 0.05});
  for (int step = 0; step < 500; ++step) {
    p.zero_grad();
    for (std::size_t i = 0; i < 3; ++i) p.at("x").grad[i] = 2.0 * p.at("x").value[i];
    adam.step(p);
  }
  EXPECT_LT(numkit::l2_norm(p.at("x").value.data()), 1e-3);
}

TEST(Adam, PadRowsStayZeroUnderTraining) {
  const Model m(tiny_config(small_corpus().vocab));
  ParamStore p = m.init_params(1);
  Adam adam({.learning_rate = 0.01});
  std::vector<const ImpressionInstance*> batch;
  for (const auto& i : first(32)) batch.push_back(&i);
  for (int step = 0; step < 100; ++step) {
    compute_gradients(m, p, batch, LossKind::kJoint);
    // Nonzero gradient on the pad row must not leak in.
    for (auto& [name, param] : p)
      if (param.frozen_row0) param.grad.row(0)[0] = 1.0;
    adam.step(p);
  }
  for (model::IdSpace s : model::kAllSpaces) {
    for (double v : p.at(Model::embedding_name(s)).value.row(0)) EXPECT_EQ(v, 0.0);
  }
}

TEST(Adam, SkipsNonTrainableEntries) {
  ParamStore p;
  p.add("fixed", Tensor::from_rows({{1.0}}), false);
  p.at("fixed").grad[0] = 5.0;
  Adam adam;
  adam.step(p);
  EXPECT_EQ(p.at("fixed").value[0], 1.0);
}

TEST(Train, OneSmallStepReducesTheInstanceLoss) {
  const Model m(tiny_config(small_corpus().vocab));
  ParamStore p = m.init_params(2);
  const auto& inst = small_corpus().instances[5];
  const double before = batch_loss(m, p, inst, LossKind::kJoint);
  const ImpressionInstance* b[] = {&inst};
  compute_gradients(m, p, b, LossKind::kJoint);
  Adam adam({.learning_rate = 1e-4});
  adam.step(p);
  EXPECT_LT(batch_loss(m, p, inst, LossKind::kJoint), before);
}

TEST(Train, SingleTaskModesTouchOnlyTheirHead) {
  const Model m(tiny_config(small_corpus().vocab));
  ParamStore p = m.init_params(3);
  std::vector<const ImpressionInstance*> batch;
  for (const auto& i : first(16)) batch.push_back(&i);

  compute_gradients(m, p, batch, loss_kind(TrainMode::kSingleRetrieval));
  for (const auto& name : m.prerank_param_names())
    for (double g : p.at(name).grad.data()) EXPECT_EQ(g, 0.0) << name;

  // Pre-rank training never reads gamma.
  model::EncoderConfig other = m.config();
  other.gamma = 1.0;
  const Model m2(other);
  ParamStore p2 = p;
  const double a = compute_gradients(m, p, batch, loss_kind(TrainMode::kSinglePrerank));
  const double b = compute_gradients(m2, p2, batch, loss_kind(TrainMode::kSinglePrerank));
  EXPECT_EQ(a, b);
  for (const auto& [name, param] : p) EXPECT_EQ(param.grad, p2.at(name).grad) << name;
}

TrainConfig quick(TrainMode mode, std::size_t epochs = 2) {
  TrainConfig c;
  c.mode = mode;
  c.batch_size = 32;
  c.max_epochs = epochs;
  c.patience = 0;
  c.seed = 4;
  return c;
}

TEST(Train, BitwiseReproducible) {
  const Model m(tiny_config(small_corpus().vocab));
  const auto a = train(m, m.init_params(5), first(400), first(400).last(100), quick(TrainMode::kJoint));
  const auto b = train(m, m.init_params(5), first(400), first(400).last(100), quick(TrainMode::kJoint));
  EXPECT_TRUE(a.final_params.same_values(b.final_params));
  EXPECT_TRUE(a.best_params.same_values(b.best_params));
  EXPECT_EQ(a.steps, 26u);
}

TEST(Train, JointWithExtremeAlphaFollowsSingleTaskTrajectory) {
  for (const auto& [alpha, single] : {std::pair{1.0, TrainMode::kSingleRetrieval},
                                      std::pair{0.0, TrainMode::kSinglePrerank}}) {
    model::EncoderConfig c = tiny_config(small_corpus().vocab);
    c.alpha = alpha;
    const Model m(c);
    std::vector<ParamStore> joint_steps, single_steps;
    auto record = [](std::vector<ParamStore>& out) {
      return [&out](std::size_t, std::size_t, const ParamStore& p) { out.push_back(p); };
    };
    train(m, m.init_params(6), first(200), {}, quick(TrainMode::kJoint), record(joint_steps));
    train(m, m.init_params(6), first(200), {}, quick(single), record(single_steps));
    ASSERT_EQ(joint_steps.size(), single_steps.size());
    for (std::size_t s = 0; s < joint_steps.size(); ++s) {
      ASSERT_TRUE(joint_steps[s].same_values(single_steps[s])) << "alpha " << alpha << " step " << s;
    }
  }
}

TEST(Train, NonFiniteLossIsDivergence) {
  const Model m(tiny_config(small_corpus().vocab));
  ParamStore p = m.init_params(7);
  p.at("qu_proj/b").value[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(train(m, p, first(64), {}, quick(TrainMode::kJoint)), DivergenceError);
}

TEST(Train, EmptyTrainingSetIsRejected) {
  const Model m(tiny_config(small_corpus().vocab));
  EXPECT_THROW(train(m, m.init_params(1), {}, {}, quick(TrainMode::kJoint)), EmptyCorpusError);
  TrainConfig bad = quick(TrainMode::kJoint);
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Train, HistoryCsvHasOneRowPerEpoch) {
  const Model m(tiny_config(small_corpus().vocab));
  const auto r = train(m, m.init_params(8), first(300), first(300).last(80), quick(TrainMode::kJoint, 3));
  ASSERT_EQ(r.history.size(), 3u);
  EXPECT_GE(r.best_epoch, 1u);
  EXPECT_LE(r.best_epoch, 3u);
  testing::TempDir dir("history");
  write_history_csv(dir / "h.csv", r.history);
  std::ifstream in(dir / "h.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 4u);
}

TEST(Train, ModeNamesRoundTrip) {
  for (TrainMode m : {TrainMode::kJoint, TrainMode::kSingleRetrieval, TrainMode::kSinglePrerank}) {
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  }
  EXPECT_THROW(parse_mode("BOTH"), ConfigError);
}

TEST(TrainExperiment, JointTrainingLearnsPlantedSignal) {
  dataio::SyntheticConfig sc;
  sc.n_users = 1000;
  const auto corpus = dataio::generate_synthetic(sc);
  const auto vocab = dataio::build_vocab(corpus.records, dataio::TopK::uniform(dataio::kUnlimitedTopK));
  const auto inst = dataio::make_instances(corpus.records, vocab, 6);
  const auto parts = dataio::split_by_day(inst, dataio::DatasetSplit::consecutive(sc.start_day));
  model::EncoderConfig c;
  c.vocab_sizes = vocab.sizes();
  const Model m(c);
  TrainConfig t;  // defaults: 5 epochs, batch 128
  const auto r = train(m, m.init_params(1), parts.train, parts.validation, t);
  double best = 0.0;
  for (const auto& h : r.history) best = std::max({best, h.val_auc_retrieval, h.val_auc_prerank});
  EXPECT_GT(best, 0.55);
}

TEST(TrainExperiment, SingleCategoryGivesChanceAuc) {
  dataio::SyntheticConfig sc;
  sc.n_users = 600;
  sc.n_categories = 1;
  const auto corpus = dataio::generate_synthetic(sc);
  const auto vocab = dataio::build_vocab(corpus.records, dataio::TopK::uniform(dataio::kUnlimitedTopK));
  const auto inst = dataio::make_instances(corpus.records, vocab, 6);
  const auto parts = dataio::split_by_day(inst, dataio::DatasetSplit::consecutive(sc.start_day));
  const Model m(tiny_config(vocab, EncoderVariant::kAttentionGruRnn));
  const auto r = train(m, m.init_params(2), parts.train, parts.validation, quick(TrainMode::kJoint, 3));
  const auto pred = m.predict(r.best_params, parts.test);
  std::vector<double> y;
  for (const auto& i : parts.test) y.push_back(i.label);
  // About 2000 test rows: the AUC standard error is near 0.013.
  EXPECT_NEAR(evaluator::auc(pred.retrieval, y), 0.5, 0.05);
  EXPECT_NEAR(evaluator::auc(pred.prerank, y), 0.5, 0.05);
}

}  // namespace
}  // namespace admatch::trainer
