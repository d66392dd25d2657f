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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "admatch/model/model.hpp"
#include "admatch/numkit/param_store.hpp"
#include "admatch/trainer/adam.hpp"

namespace admatch::trainer {

enum class TrainMode : std::uint8_t { kJoint, kSingleRetrieval, kSinglePrerank };

std::string_view mode_name(TrainMode mode);  // "JOINT", "SINGLE_RETRIEVAL", "SINGLE_PRERANK"
TrainMode parse_mode(std::string_view name);
model::LossKind loss_kind(TrainMode mode);

// gamma and alpha live on model::EncoderConfig; they shape the graph rather
// than the optimization loop.
struct TrainConfig {
  std::size_t batch_size = 128;
  TrainMode mode = TrainMode::kJoint;
  AdamConfig adam;
  std::size_t max_epochs = 5;
  // Epochs without a validation gain before stopping; 0 disables stopping.
  std::size_t patience = 2;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // instance-weighted mean over the epoch's batches
  // NaN when the validation set is empty or single-class.
  double val_auc_retrieval = 0.0;
  double val_auc_prerank = 0.0;
};

struct TrainResult {
  numkit::ParamStore best_params;   // highest validation score; final params when no validation
  numkit::ParamStore final_params;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  std::uint64_t steps = 0;
};

// Called after every optimizer step with (epoch, step-within-epoch, params).
using StepHook = std::function<void(std::size_t, std::size_t, const numkit::ParamStore&)>;

// Mini-batch training with a seeded per-epoch shuffle and one Adam step per
// batch. Early stopping ranks epochs by the head the mode trains; JOINT ranks
// by pre-rank AUC with retrieval AUC as tie-break. Throws EmptyCorpusError on
// an empty training set and DivergenceError when a batch loss is not finite.
TrainResult train(const model::Model& model, numkit::ParamStore params,
                  std::span<const model::ImpressionInstance> train_set,
                  std::span<const model::ImpressionInstance> validation_set,
                  const TrainConfig& config, const StepHook& on_step = {});

// One forward/backward pass; gradients are written into `params` (zeroed
// first). Returns the batch loss.
double compute_gradients(const model::Model& model, numkit::ParamStore& params,
                         std::span<const model::ImpressionInstance* const> batch,
                         model::LossKind kind);

void write_history_csv(const std::filesystem::path& path, std::span<const EpochStats> history);

}  // namespace admatch::trainer
