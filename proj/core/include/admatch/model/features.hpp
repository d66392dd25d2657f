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
#include <string>
#include <vector>

namespace admatch::model {

using Id = std::int32_t;

// One past user behavior (a clicked item). Id 0 is the pad/OOV id in every
// space; an all-zero item with empty sequences is a pad slot.
struct BehaviorItem {
  Id item_id = 0;
  Id shop_id = 0;
  Id brand_id = 0;
  std::vector<Id> title_term_ids;
  std::vector<Id> query_term_ids;  // the search that led to this behavior

  bool is_pad() const {
    return item_id == 0 && shop_id == 0 && brand_id == 0 && title_term_ids.empty() &&
           query_term_ids.empty();
  }
  friend bool operator==(const BehaviorItem&, const BehaviorItem&) = default;
};

struct AdItem {
  Id item_id = 0;
  Id shop_id = 0;
  Id brand_id = 0;
  std::vector<Id> title_term_ids;
  friend bool operator==(const AdItem&, const AdItem&) = default;
};

// Query side of an impression: current query, profile, and exactly `window`
// behavior slots ordered oldest to newest, left-padded.
struct QueryRequest {
  std::vector<Id> query_term_ids;
  std::vector<Id> profile_ids;
  std::vector<BehaviorItem> behaviors;
  friend bool operator==(const QueryRequest&, const QueryRequest&) = default;
};

// Provenance carried alongside an instance; not a model input.
struct InstanceMeta {
  std::string user_id;
  std::int64_t timestamp = 0;
  std::string day;
  std::uint64_t ad_id = 0;
  std::string raw_query;
  double cost = 0.0;
  int intent_category = -1;  // generator ground truth, -1 when unknown
  int ad_category = -1;
  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct ImpressionInstance {
  QueryRequest request;
  AdItem ad;
  double label = 0.0;  // 1 when clicked
  InstanceMeta meta;
  friend bool operator==(const ImpressionInstance&, const ImpressionInstance&) = default;
};

}  // namespace admatch::model
