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

#include <cstddef>
#include <vector>

#include "admatch/dataio/log_record.hpp"
#include "admatch/dataio/vocabulary.hpp"
#include "admatch/model/features.hpp"

namespace admatch::dataio {

model::BehaviorItem to_behavior_item(const BehaviorEvent& event, const Vocabulary& vocab);
model::AdItem to_ad_item(const ItemDescriptor& item, const Vocabulary& vocab);

// Builds a request from raw tokens. `history` may hold any number of events
// in time order; the latest `window` events before `timestamp` are kept and
// left-padded.
model::QueryRequest to_request(const std::vector<std::string>& query_terms,
                               const std::vector<std::string>& profile,
                               const std::vector<BehaviorEvent>& history, std::int64_t timestamp,
                               const Vocabulary& vocab, std::size_t window);

// One instance per record, in input order. Each user's behaviors are pooled
// over all of their records (deduplicated on timestamp and item), so an
// impression sees every earlier behavior in the corpus, not only those
// attached to its own record. Throws ConfigError when window == 0.
std::vector<model::ImpressionInstance> make_instances(const std::vector<LogRecord>& logs,
                                                      const Vocabulary& vocab,
                                                      std::size_t window = 6);

}  // namespace admatch::dataio
