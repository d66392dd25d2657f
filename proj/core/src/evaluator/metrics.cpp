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

#include "admatch/evaluator/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "admatch/common/error.hpp"

namespace admatch::evaluator {

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError(fmt::format("auc: {} scores but {} labels", scores.size(), labels.size()));
  }
  std::uint64_t n_pos = 0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("auc: labels must be 0 or 1");
    if (y == 1.0) ++n_pos;
  }
  const std::uint64_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedAucError(fmt::format("auc needs both classes ({} positive, {} negative)", n_pos, n_neg));
  }
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("auc: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum of the positives, so mid-ranks stay integral.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi + 1 < order.size() && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const std::uint64_t twice_mid = (lo + 1) + (hi + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      if (labels[order[i]] == 1.0) twice_rank_sum += twice_mid;
    }
    lo = hi + 1;
  }
  const std::uint64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

PredictionStats prediction_stats(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("prediction_stats: empty input");
  PredictionStats s;
  const auto [mn, mx] = std::minmax_element(p.begin(), p.end());
  s.min = *mn;
  s.max = *mx;
  if (s.min == s.max) {
    s.mean = s.min;
    return s;
  }
  double sum = 0.0;
  for (double v : p) sum += v;
  s.mean = sum / static_cast<double>(p.size());
  double ss = 0.0;
  for (double v : p) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(p.size());
  // Rounding can push the mean a hair outside [min, max] on constant input.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

std::string format_stats(const PredictionStats& s, int precision) {
  return fmt::format("({:.{}f}, {:.{}f}, [{:.{}f}, {:.{}f}])", s.mean, precision, s.variance,
                     precision, s.min, precision, s.max, precision);
}

}  // namespace admatch::evaluator
