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

#include "admatch/dataio/instances.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "admatch/common/error.hpp"

namespace admatch::dataio {

using model::IdSpace;

model::BehaviorItem to_behavior_item(const BehaviorEvent& event, const Vocabulary& vocab) {
  model::BehaviorItem b;
  b.item_id = vocab.lookup(IdSpace::kItem, event.item.item_id);
  b.shop_id = vocab.lookup(IdSpace::kShop, event.item.shop_id);
  b.brand_id = vocab.lookup(IdSpace::kBrand, event.item.brand_id);
  b.title_term_ids = vocab.lookup(IdSpace::kTerm, event.item.title_terms);
  b.query_term_ids = vocab.lookup(IdSpace::kTerm, event.source_query);
  return b;
}

model::AdItem to_ad_item(const ItemDescriptor& item, const Vocabulary& vocab) {
  model::AdItem a;
  a.item_id = vocab.lookup(IdSpace::kItem, item.item_id);
  a.shop_id = vocab.lookup(IdSpace::kShop, item.shop_id);
  a.brand_id = vocab.lookup(IdSpace::kBrand, item.brand_id);
  a.title_term_ids = vocab.lookup(IdSpace::kTerm, item.title_terms);
  return a;
}

namespace {

// `history` must be sorted by timestamp.
std::vector<model::BehaviorItem> window_before(const std::vector<const BehaviorEvent*>& history,
                                               std::int64_t timestamp, const Vocabulary& vocab,
                                               std::size_t window) {
  auto end = std::lower_bound(history.begin(), history.end(), timestamp,
                              [](const BehaviorEvent* e, std::int64_t t) { return e->timestamp < t; });
  const auto available = static_cast<std::size_t>(end - history.begin());
  const std::size_t take = std::min(available, window);
  std::vector<model::BehaviorItem> out(window - take);
  for (auto it = end - static_cast<std::ptrdiff_t>(take); it != end; ++it) {
    out.push_back(to_behavior_item(**it, vocab));
  }
  return out;
}

}  // namespace

model::QueryRequest to_request(const std::vector<std::string>& query_terms,
                               const std::vector<std::string>& profile,
                               const std::vector<BehaviorEvent>& history, std::int64_t timestamp,
                               const Vocabulary& vocab, std::size_t window) {
  if (window == 0) throw ConfigError("window must be at least 1");
  std::vector<const BehaviorEvent*> sorted;
  sorted.reserve(history.size());
  for (const auto& e : history) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });
  model::QueryRequest req;
  req.query_term_ids = vocab.lookup(IdSpace::kTerm, query_terms);
  req.profile_ids = vocab.lookup(IdSpace::kProfile, profile);
  req.behaviors = window_before(sorted, timestamp, vocab, window);
  return req;
}

std::vector<model::ImpressionInstance> make_instances(const std::vector<LogRecord>& logs,
                                                      const Vocabulary& vocab,
                                                      std::size_t window) {
  if (window == 0) throw ConfigError("window must be at least 1");

  // Per-user timeline keyed on (timestamp, item_id); the first occurrence wins.
  std::map<std::string, std::map<std::pair<std::int64_t, std::string>, const BehaviorEvent*>> pooled;
  for (const LogRecord& r : logs) {
    auto& timeline = pooled[r.user_id];
    for (const BehaviorEvent& e : r.behavior_items) {
      timeline.try_emplace({e.timestamp, e.item.item_id}, &e);
    }
  }
  std::map<std::string, std::vector<const BehaviorEvent*>> timelines;
  for (const auto& [user, timeline] : pooled) {
    auto& v = timelines[user];
    v.reserve(timeline.size());
    for (const auto& [key, e] : timeline) v.push_back(e);
  }

  std::vector<model::ImpressionInstance> out;
  out.reserve(logs.size());
  for (const LogRecord& r : logs) {
    model::ImpressionInstance inst;
    inst.request.query_term_ids = vocab.lookup(IdSpace::kTerm, r.query_terms);
    inst.request.profile_ids = vocab.lookup(IdSpace::kProfile, r.profile);
    inst.request.behaviors = window_before(timelines.at(r.user_id), r.timestamp, vocab, window);
    inst.ad = to_ad_item(r.ad.item, vocab);
    inst.label = r.clicked == 1 ? 1.0 : 0.0;
    inst.meta.user_id = r.user_id;
    inst.meta.timestamp = r.timestamp;
    inst.meta.day = r.day;
    inst.meta.ad_id = r.ad.ad_id;
    inst.meta.raw_query = r.raw_query();
    inst.meta.cost = r.ad.cost;
    inst.meta.intent_category = r.intent_category;
    inst.meta.ad_category = r.ad.item.category;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace admatch::dataio
