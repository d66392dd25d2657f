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

#include "admatch/dataio/split.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "admatch/common/error.hpp"
#include "admatch/common/random.hpp"

namespace admatch::dataio {
namespace {

constexpr std::uint64_t kHashBuckets = 1'000'000;

template <typename T, typename DayOf, typename KeyOf>
SplitParts<T> split_impl(const std::vector<T>& samples, const DatasetSplit& split, DayOf day_of,
                         KeyOf key_of) {
  split.validate();
  std::set<std::string> seen;
  for (const T& s : samples) seen.insert(day_of(s));
  std::vector<std::string> missing;
  for (const auto& d : split.train_days) {
    if (!seen.contains(d)) missing.push_back(d);
  }
  if (!seen.contains(split.test_day)) missing.push_back(split.test_day);
  if (!missing.empty()) {
    std::string msg = "no records for";
    for (const auto& d : missing) msg += " " + d;
    throw CoverageError(msg);
  }

  const std::set<std::string> train(split.train_days.begin(), split.train_days.end());
  SplitParts<T> parts;
  for (const T& s : samples) {
    const std::string& day = day_of(s);
    if (day == split.test_day) {
      parts.test.push_back(s);
    } else if (train.contains(day)) {
      const auto& [user, ts] = key_of(s);
      (in_validation(user, ts, split.validation_fraction) ? parts.validation : parts.train)
          .push_back(s);
    }
  }
  return parts;
}

}  // namespace

DatasetSplit DatasetSplit::consecutive(const std::string& first, int train_span) {
  DatasetSplit s;
  const Date d0 = parse_date(first);
  for (int i = 0; i < train_span; ++i) s.train_days.push_back(format_date(d0 + std::chrono::days(i)));
  s.test_day = format_date(d0 + std::chrono::days(train_span));
  return s;
}

void DatasetSplit::validate() const {
  if (train_days.empty()) throw ConfigError("split needs at least one training day");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must lie in [0, 1)");
  }
  Date prev = parse_date(train_days.front());
  for (std::size_t i = 1; i < train_days.size(); ++i) {
    const Date d = parse_date(train_days[i]);
    if (d != prev + std::chrono::days(1)) {
      throw ConfigError("training days must be consecutive: " + train_days[i - 1] + ", " +
                        train_days[i]);
    }
    prev = d;
  }
  if (parse_date(test_day) <= prev) {
    throw ConfigError("test day " + test_day + " must follow every training day");
  }
}

bool in_validation(const std::string& user_id, std::int64_t timestamp, double fraction) {
  const std::string key = user_id + ":" + std::to_string(timestamp);
  const auto threshold = static_cast<std::uint64_t>(fraction * static_cast<double>(kHashBuckets));
  return fnv1a64(key) % kHashBuckets < threshold;
}

SplitParts<LogRecord> split_by_day(const std::vector<LogRecord>& logs, const DatasetSplit& split) {
  return split_impl(
      logs, split, [](const LogRecord& r) -> const std::string& { return r.day; },
      [](const LogRecord& r) { return std::pair<const std::string&, std::int64_t>(r.user_id, r.timestamp); });
}

SplitParts<model::ImpressionInstance> split_by_day(
    const std::vector<model::ImpressionInstance>& instances, const DatasetSplit& split) {
  return split_impl(
      instances, split,
      [](const model::ImpressionInstance& r) -> const std::string& { return r.meta.day; },
      [](const model::ImpressionInstance& r) {
        return std::pair<const std::string&, std::int64_t>(r.meta.user_id, r.meta.timestamp);
      });
}

}  // namespace admatch::dataio
