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

#include "admatch/trainer/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/common/random.hpp"
#include "admatch/evaluator/metrics.hpp"

namespace admatch::trainer {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double safe_auc(std::span<const double> scores, std::span<const double> labels) {
  try {
    return evaluator::auc(scores, labels);
  } catch (const UndefinedAucError&) {
    return kNan;
  }
}

// Larger is better; NaN never wins.
bool better(double a_primary, double a_tie, double b_primary, double b_tie) {
  if (std::isnan(a_primary)) return false;
  if (std::isnan(b_primary)) return true;
  if (a_primary != b_primary) return a_primary > b_primary;
  if (std::isnan(a_tie)) return false;
  if (std::isnan(b_tie)) return true;
  return a_tie > b_tie;
}

std::string describe_batch(std::span<const model::ImpressionInstance* const> batch) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(batch.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& m = batch[i]->meta;
    out += fmt::format("{}{}@{}/ad{}", i ? ", " : "", m.user_id, m.timestamp, m.ad_id);
  }
  if (batch.size() > shown) out += fmt::format(", ... ({} total)", batch.size());
  return out;
}

}  // namespace

std::string_view mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kJoint: return "JOINT";
    case TrainMode::kSingleRetrieval: return "SINGLE_RETRIEVAL";
    case TrainMode::kSinglePrerank: return "SINGLE_PRERANK";
  }
  return "?";
}

TrainMode parse_mode(std::string_view name) {
  for (TrainMode m : {TrainMode::kJoint, TrainMode::kSingleRetrieval, TrainMode::kSinglePrerank}) {
    if (mode_name(m) == name) return m;
  }
  throw ConfigError(fmt::format("unknown training mode '{}'", name));
}

model::LossKind loss_kind(TrainMode mode) {
  switch (mode) {
    case TrainMode::kJoint: return model::LossKind::kJoint;
    case TrainMode::kSingleRetrieval: return model::LossKind::kRetrieval;
    case TrainMode::kSinglePrerank: return model::LossKind::kPrerank;
  }
  return model::LossKind::kJoint;
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  Adam check(adam);
}

double compute_gradients(const model::Model& model, numkit::ParamStore& params,
                         std::span<const model::ImpressionInstance* const> batch,
                         model::LossKind kind) {
  params.zero_grad();
  numkit::Tape tape(params);
  numkit::Var loss = model.loss(tape, batch, kind);
  const double value = loss.value()[0];
  tape.backward(loss);
  tape.accumulate_into(params);
  return value;
}

TrainResult train(const model::Model& model, numkit::ParamStore params,
                  std::span<const model::ImpressionInstance> train_set,
                  std::span<const model::ImpressionInstance> validation_set,
                  const TrainConfig& config, const StepHook& on_step) {
  config.validate();
  model.config().validate();
  if (train_set.empty()) throw EmptyCorpusError("training set is empty");
  for (const auto& inst : train_set) {
    model.check_ids(inst.request);
    model.check_ids(inst.ad);
  }

  const model::LossKind kind = loss_kind(config.mode);
  Adam adam(config.adam);
  Rng rng(config.seed);
  std::vector<double> val_labels;
  for (const auto& inst : validation_set) val_labels.push_back(inst.label);

  TrainResult result;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best_primary = kNan;
  double best_tie = kNan;
  std::size_t stale = 0;
  bool have_best = false;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    std::size_t step = 0;
    std::vector<const model::ImpressionInstance*> batch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set[order[i]]);
      const double loss = compute_gradients(model, params, batch, kind);
      if (!std::isfinite(loss)) {
        throw DivergenceError(fmt::format("loss {} at epoch {}, step {}; batch: {}", loss, epoch,
                                          step, describe_batch(batch)));
      }
      adam.step(params);
      loss_sum += loss * static_cast<double>(batch.size());
      ++step;
      if (on_step) on_step(epoch, step, params);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.val_auc_retrieval = kNan;
    stats.val_auc_prerank = kNan;
    if (!validation_set.empty()) {
      const model::Predictions pred = model.predict(params, validation_set);
      stats.val_auc_retrieval = safe_auc(pred.retrieval, val_labels);
      stats.val_auc_prerank = safe_auc(pred.prerank, val_labels);
    }
    result.history.push_back(stats);
    log::info(fmt::format("epoch {}: loss {:.6f}, val auc retrieval {:.4f}, prerank {:.4f}", epoch,
                          stats.train_loss, stats.val_auc_retrieval, stats.val_auc_prerank));

    double primary = stats.val_auc_prerank;
    double tie = stats.val_auc_retrieval;
    if (config.mode == TrainMode::kSingleRetrieval) std::swap(primary, tie);

    if (!have_best || better(primary, tie, best_primary, best_tie)) {
      have_best = true;
      best_primary = primary;
      best_tie = tie;
      result.best_params = params;
      result.best_epoch = epoch;
      stale = 0;
    } else if (!std::isnan(primary) && ++stale >= config.patience && config.patience > 0) {
      log::info(fmt::format("early stop after epoch {} (best {})", epoch, result.best_epoch));
      break;
    }
  }
  result.steps = adam.steps();
  if (std::isnan(best_primary)) {
    // No usable validation signal: the last epoch is the result.
    result.best_params = params;
    result.best_epoch = result.history.back().epoch;
  }
  params.zero_grad();
  result.best_params.zero_grad();
  result.final_params = std::move(params);
  return result;
}

void write_history_csv(const std::filesystem::path& path, std::span<const EpochStats> history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << "epoch,train_loss,val_auc_retrieval,val_auc_prerank\n";
  for (const auto& h : history) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", h.epoch, h.train_loss, h.val_auc_retrieval,
                       h.val_auc_prerank);
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace admatch::trainer
