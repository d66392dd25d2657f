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
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "admatch/dataio/log_record.hpp"
#include "admatch/dataio/split.hpp"
#include "admatch/dataio/vocabulary.hpp"
#include "admatch/model/config.hpp"
#include "admatch/model/features.hpp"
#include "admatch/trainer/trainer.hpp"

namespace admatch::cli {

// Options shared by every command that reads logs and splits them by day.
struct DataOptions {
  std::string logs;
  std::string vocab;
  std::string first_train_day;  // empty: earliest day in the logs
  int train_days = 3;
  double validation_fraction = 0.05;
};

struct Dataset {
  std::vector<dataio::LogRecord> logs;
  dataio::Vocabulary vocab;
  std::vector<model::ImpressionInstance> instances;
  dataio::SplitParts<model::ImpressionInstance> parts;
};

void add_data_options(CLI::App* cmd, DataOptions& opts);
void add_encoder_options(CLI::App* cmd, model::EncoderConfig& config);
void add_train_options(CLI::App* cmd, trainer::TrainConfig& config);

Dataset load_dataset(const DataOptions& opts, std::size_t window);

void add_data_commands(CLI::App& app, std::uint64_t& seed);
void add_model_commands(CLI::App& app, std::uint64_t& seed);
void add_serving_commands(CLI::App& app, std::uint64_t& seed);

}  // namespace admatch::cli
