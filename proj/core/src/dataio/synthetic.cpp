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

#include "admatch/dataio/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <tuple>

#include "admatch/common/error.hpp"
#include "admatch/common/random.hpp"

namespace admatch::dataio {
namespace {

constexpr std::int64_t kDaySeconds = 86400;

std::string cat_token(char prefix, std::size_t category, std::size_t j) {
  return std::string(1, prefix) + std::to_string(category) + "_" + std::to_string(j);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

// k distinct draws from [0, n).
std::vector<std::size_t> distinct(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  rng.shuffle(std::span(all));
  all.resize(std::min(k, n));
  return all;
}

struct Catalog {
  std::vector<ItemDescriptor> items;
  std::vector<std::vector<std::size_t>> items_by_category;
  std::vector<AdDescriptor> ads;
  std::vector<std::vector<std::size_t>> ads_by_category;  // indices into ads
};

Catalog make_catalog(const SyntheticConfig& c, Rng& rng) {
  Catalog cat;
  cat.items_by_category.resize(c.n_categories);
  cat.ads_by_category.resize(c.n_categories);
  for (std::size_t i = 0; i < c.n_items; ++i) {
    const std::size_t k = i % c.n_categories;
    ItemDescriptor item;
    item.item_id = "i" + std::to_string(i);
    item.category = static_cast<int>(k);
    item.shop_id = cat_token('s', k, rng.index(c.shops_per_category));
    item.brand_id = cat_token('b', k, rng.index(c.brands_per_category));
    for (std::size_t j : distinct(rng, c.terms_per_category, c.title_length)) {
      item.title_terms.push_back(cat_token('t', k, j));
    }
    cat.items_by_category[k].push_back(i);
    if (rng.bernoulli(c.ad_fraction)) {
      AdDescriptor ad;
      ad.ad_id = i + 1;
      ad.item = item;
      ad.cost = rng.uniform(0.1, 2.0);
      const std::size_t n_bid = 1 + rng.index(std::min<std::size_t>(2, item.title_terms.size()));
      for (std::size_t j : distinct(rng, item.title_terms.size(), n_bid)) {
        ad.bid_keywords.push_back(item.title_terms[j]);
      }
      cat.ads_by_category[k].push_back(cat.ads.size());
      cat.ads.push_back(std::move(ad));
    }
    cat.items.push_back(std::move(item));
  }
  for (std::size_t k = 0; k < c.n_categories; ++k) {
    if (cat.ads_by_category[k].empty()) {
      // Guarantee every category is advertised: promote its first item.
      const ItemDescriptor& item = cat.items[cat.items_by_category[k].front()];
      AdDescriptor ad;
      ad.ad_id = cat.items_by_category[k].front() + 1;
      ad.item = item;
      ad.cost = rng.uniform(0.1, 2.0);
      ad.bid_keywords = {item.title_terms.front()};
      cat.ads_by_category[k].push_back(cat.ads.size());
      cat.ads.push_back(std::move(ad));
    }
  }
  return cat;
}

std::string head_term(Rng& rng, const SyntheticConfig& c, std::size_t category) {
  return cat_token('t', category, rng.index(c.terms_per_category));
}

}  // namespace

std::string long_tail_token(std::size_t k) { return "x" + std::to_string(k); }

SyntheticCorpus generate_synthetic(const SyntheticConfig& c) {
  if (c.n_categories == 0) throw ConfigError("n_categories must be at least 1");
  if (c.n_items < c.n_categories) throw ConfigError("n_items must be at least n_categories");
  if (c.n_users == 0 || c.days == 0) throw ConfigError("n_users and days must be positive");
  if (c.terms_per_category == 0 || c.brands_per_category == 0 || c.shops_per_category == 0 ||
      c.title_length == 0) {
    throw ConfigError("category pools must be non-empty");
  }
  if (c.sessions_per_day < 1.0 || c.sessions_per_day > 3.0) {
    throw ConfigError("sessions_per_day must lie in [1, 3]");
  }
  check_probability(c.p_hi, "p_hi");
  check_probability(c.p_lo, "p_lo");
  check_probability(c.long_tail_fraction, "long_tail_fraction");
  check_probability(c.neighbor_interest, "neighbor_interest");
  check_probability(c.single_interest, "single_interest");
  check_probability(c.ad_fraction, "ad_fraction");
  check_probability(c.trailing_behavior, "trailing_behavior");

  const Date start = parse_date(c.start_day);
  const std::size_t C = c.n_categories;

  Rng catalog_rng(mix_seed(c.seed, 1));
  Catalog catalog = make_catalog(c, catalog_rng);

  SyntheticCorpus out;
  for (std::size_t u = 0; u < c.n_users; ++u) {
    Rng rng(mix_seed(c.seed, 1000 + u));
    const std::string user_id = "u" + std::to_string(u);
    const std::vector<std::string> profile = {"age:" + std::to_string(rng.index(6)),
                                              "gender:" + std::to_string(rng.index(2))};
    for (std::size_t d = 0; d < c.days; ++d) {
      const Date day = start + std::chrono::days(static_cast<int>(d));
      const std::string day_text = format_date(day);
      const std::int64_t day_start = day.time_since_epoch().count() * kDaySeconds;

      // 1..3 sessions with mean sessions_per_day.
      std::size_t n_sessions = 1;
      const double extra = c.sessions_per_day - 1.0;
      if (rng.bernoulli(extra / 2.0)) ++n_sessions;
      if (rng.bernoulli(extra / 2.0)) ++n_sessions;
      // Session slots are disjoint hour-long windows so timelines never overlap.
      const std::vector<std::size_t> slots = [&] {
        auto s = distinct(rng, 20, n_sessions);
        std::sort(s.begin(), s.end());
        return s;
      }();

      for (std::size_t slot : slots) {
        std::int64_t t = day_start + static_cast<std::int64_t>(slot + 2) * 3600 +
                         static_cast<std::int64_t>(rng.index(600));
        const std::size_t intent = rng.index(C);

        std::vector<std::string> query;
        std::size_t neighbor = intent;
        const bool long_tail = rng.bernoulli(c.long_tail_fraction);
        if (long_tail) {
          // Token x<k> covers k and k+1; pick which of the two shares it.
          if (rng.bernoulli(0.5)) {
            query = {long_tail_token(intent)};
            neighbor = (intent + 1) % C;
          } else {
            const std::size_t k = (intent + C - 1) % C;
            query = {long_tail_token(k)};
            neighbor = k;
          }
        } else {
          query = {head_term(rng, c, intent)};
        }

        std::optional<std::size_t> second;
        if (!rng.bernoulli(c.single_interest)) {
          second = (long_tail && rng.bernoulli(c.neighbor_interest)) ? neighbor : rng.index(C);
        }

        const std::size_t n_behaviors = 3 + rng.index(4);
        std::vector<BehaviorEvent> behaviors;
        for (std::size_t b = 0; b < n_behaviors; ++b) {
          t += 30 + static_cast<std::int64_t>(rng.index(90));
          const bool primary = !second || rng.bernoulli(0.5);
          const std::size_t k = primary ? intent : *second;
          const auto& pool = catalog.items_by_category[k];
          BehaviorEvent e;
          e.timestamp = t;
          e.item = catalog.items[pool[rng.index(pool.size())]];
          // Second-interest behaviors are organic browsing with no query.
          if (primary) e.source_query = query;
          behaviors.push_back(std::move(e));
        }

        const std::size_t n_impressions = 1 + rng.index(3);
        std::vector<std::int64_t> impression_times;
        for (std::size_t i = 0; i < n_impressions; ++i) {
          t += 5 + static_cast<std::int64_t>(rng.index(55));
          impression_times.push_back(t);
        }
        if (rng.bernoulli(c.trailing_behavior)) {
          // A behavior after the first impression that later impressions may
          // see but the first one must not.
          const std::int64_t t_after = impression_times.front() + 1;
          if (n_impressions == 1 || t_after < impression_times[1]) {
            BehaviorEvent e;
            e.timestamp = t_after;
            const auto& pool = catalog.items_by_category[intent];
            e.item = catalog.items[pool[rng.index(pool.size())]];
            e.source_query = query;
            behaviors.push_back(std::move(e));
          }
        }

        for (std::int64_t ts : impression_times) {
          const double r = rng.uniform();
          std::size_t ad_category;
          if (r < 0.35) {
            ad_category = intent;
          } else if (r < 0.7) {
            ad_category = second.value_or(neighbor);
          } else {
            ad_category = rng.index(C);
          }
          const auto& ads = catalog.ads_by_category[ad_category];
          LogRecord rec;
          rec.user_id = user_id;
          rec.timestamp = ts;
          rec.day = day_text;
          rec.query_terms = query;
          rec.profile = profile;
          rec.behavior_items = behaviors;
          rec.ad = catalog.ads[ads[rng.index(ads.size())]];
          rec.intent_category = static_cast<int>(intent);
          rec.clicked = rng.bernoulli(ad_category == intent ? c.p_hi : c.p_lo) ? 1 : 0;
          out.records.push_back(std::move(rec));
        }
      }
    }
  }
  std::stable_sort(out.records.begin(), out.records.end(), [](const LogRecord& a, const LogRecord& b) {
    return std::tie(a.timestamp, a.user_id) < std::tie(b.timestamp, b.user_id);
  });
  out.ads = std::move(catalog.ads);
  std::sort(out.ads.begin(), out.ads.end(),
            [](const AdDescriptor& a, const AdDescriptor& b) { return a.ad_id < b.ad_id; });
  return out;
}

}  // namespace admatch::dataio
