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

#include <string>
#include <vector>

#include "admatch/dataio/log_record.hpp"
#include "admatch/model/features.hpp"

namespace admatch::dataio {

struct DatasetSplit {
  std::vector<std::string> train_days;  // consecutive, "YYYY-MM-DD"
  std::string test_day;
  double validation_fraction = 0.05;

  // Three consecutive training days starting at `first` and the day after.
  static DatasetSplit consecutive(const std::string& first, int train_span = 3);

  // Throws ConfigError unless the train days are consecutive and the test
  // day follows all of them.
  void validate() const;
};

template <typename T>
struct SplitParts {
  std::vector<T> train;
  std::vector<T> validation;
  std::vector<T> test;
};

// Stable holdout decision for one sample.
bool in_validation(const std::string& user_id, std::int64_t timestamp, double fraction);

// Records on other days are dropped. Throws CoverageError naming every
// requested day that has no record.
SplitParts<LogRecord> split_by_day(const std::vector<LogRecord>& logs, const DatasetSplit& split);
SplitParts<model::ImpressionInstance> split_by_day(
    const std::vector<model::ImpressionInstance>& instances, const DatasetSplit& split);

}  // namespace admatch::dataio
