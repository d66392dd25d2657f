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

#include <span>
#include <string>

namespace admatch::evaluator {

// Probability that a random positive outscores a random negative, ties
// counting one half. Rank-sum with mid-ranks, O(n log n); the result is
// exactly the pair-counting value rounded once. Throws UndefinedAucError
// when only one class is present and DimensionError on length mismatch.
// Labels must be 0 or 1.
double auc(std::span<const double> scores, std::span<const double> labels);

struct PredictionStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance
  double min = 0.0;
  double max = 0.0;
};

// Throws std::invalid_argument on empty input.
PredictionStats prediction_stats(std::span<const double> predictions);

// "(0.0570, 0.0443, [0.0060, 0.3000])"
std::string format_stats(const PredictionStats& stats, int precision = 4);

}  // namespace admatch::evaluator
