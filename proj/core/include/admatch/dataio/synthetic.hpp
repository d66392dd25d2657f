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
#include <cstdint>
#include <string>
#include <vector>

#include "admatch/dataio/log_record.hpp"

namespace admatch::dataio {

struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::size_t n_users = 3000;
  std::size_t n_items = 1000;
  std::size_t n_categories = 10;
  std::size_t days = 4;
  std::string start_day = "2018-01-01";

  double p_hi = 0.6;  // click rate when the ad matches the session intent
  double p_lo = 0.05;

  double sessions_per_day = 2.0;  // mean; actual count is 1..3
  double long_tail_fraction = 0.6;
  double neighbor_interest = 0.8;  // long-tail sessions: chance the second interest is the confusable neighbor
  double single_interest = 0.2;
  double ad_fraction = 0.5;  // share of catalog items that are advertised
  double trailing_behavior = 0.2;  // chance of a behavior logged after an impression

  std::size_t terms_per_category = 8;
  std::size_t brands_per_category = 4;
  std::size_t shops_per_category = 6;
  std::size_t title_length = 3;
};

struct SyntheticCorpus {
  std::vector<LogRecord> records;  // ordered by (timestamp, user_id)
  std::vector<AdDescriptor> ads;   // ordered by ad_id
};

// Planted-structure generator. Each item belongs to one category and draws
// its title terms, shop and brand from that category's pools. A session has
// an intent category and usually a second interest; behaviors mix both.
// Intent behaviors carry the session query as their source query, while
// second-interest behaviors are organic (no source query). Head queries name
// a title term of the intent category. Long-tail queries use a token "x<k>"
// that categories k and k+1 (mod C) share and no ad bids on; the second
// interest is then usually the other category behind the token, so the bag
// of behavior features looks the same either way and only the pairing of
// items with the current query reveals the intent. Clicks follow p_hi when the ad category
// equals the intent and p_lo otherwise.
//
// Throws ConfigError on n_categories == 0, n_items < n_categories or
// probabilities outside [0, 1]. Identical configs give identical corpora.
SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

// "x<k>", the long-tail query token shared by categories k and k+1.
std::string long_tail_token(std::size_t k);

}  // namespace admatch::dataio
