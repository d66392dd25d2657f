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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "admatch/evaluator/metrics.hpp"
#include "admatch/model/config.hpp"
#include "admatch/model/features.hpp"
#include "admatch/trainer/trainer.hpp"

namespace admatch::evaluator {

struct ExperimentData {
  std::span<const model::ImpressionInstance> train;
  std::span<const model::ImpressionInstance> validation;
  std::span<const model::ImpressionInstance> test;
};

struct TaskScores {
  double auc = 0.0;  // NaN when the test set is single-class
  PredictionStats stats;
};

struct CellResult {
  std::string label;
  model::EncoderConfig encoder;
  trainer::TrainMode mode = trainer::TrainMode::kJoint;
  std::optional<TaskScores> retrieval;  // absent when the mode never trained it
  std::optional<TaskScores> prerank;
  std::size_t best_epoch = 0;
};

// Initializes from `init_seed`, trains, and scores the best parameters on
// the test set.
CellResult run_cell(const std::string& label, const model::EncoderConfig& encoder,
                    const trainer::TrainConfig& train, std::uint64_t init_seed,
                    const ExperimentData& data);

struct GammaRow {
  double gamma = 0.0;
  TaskScores retrieval;  // stats over the test-set retrieval probabilities P
};

// One run per gamma on identical data and seeds. Throws ConfigError on a
// non-positive gamma.
std::vector<GammaRow> gamma_sweep(const ExperimentData& data, std::span<const double> gammas,
                                  const model::EncoderConfig& encoder,
                                  const trainer::TrainConfig& train, std::uint64_t init_seed);

std::string gamma_table(std::span<const GammaRow> rows);
void write_gamma_csv(const std::filesystem::path& path, std::span<const GammaRow> rows);

struct OrderingCheck {
  std::string claim;  // e.g. "ATTENTION_GRU_RNN > GRU_RNN (task 2)"
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct AblationReport {
  std::vector<CellResult> variants;  // all five encoders, joint, shared
  std::vector<CellResult> training;  // attentive GRU: joint, single task 1, single task 2
  std::vector<CellResult> sharing;   // attentive GRU: share, non-share
  std::vector<OrderingCheck> orderings;
};

AblationReport ablation_suite(const ExperimentData& data, const model::EncoderConfig& encoder,
                              const trainer::TrainConfig& train, std::uint64_t init_seed);

std::string ablation_table(const AblationReport& report);
void write_ablation_csv(const std::filesystem::path& path, const AblationReport& report);

}  // namespace admatch::evaluator
