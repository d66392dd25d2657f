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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "admatch/annindex/ann_index.hpp"
#include "admatch/model/heads.hpp"
#include "admatch/model/model.hpp"
#include "admatch/pipeline/ad_parts.hpp"
#include "admatch/pipeline/bidword_index.hpp"
#include "admatch/pipeline/matching_engine.hpp"
#include "admatch/pipeline/offline.hpp"
#include "admatch/pipeline/simulator.hpp"
#include "fixtures.hpp"

namespace admatch::pipeline {
namespace {

// Untrained tiny model plus every serving artifact built from it.
struct Serving {
  model::Model model;
  numkit::ParamStore params;
  AdCatalog catalog;
  BidwordIndex bidwords;
  annindex::AnnIndex ann;
  AdPartsTable parts;

  Serving()
      : model(testing::tiny_config(testing::small_corpus().vocab)),
        params(model.init_params(11)),
        catalog(make_catalog(ads(), vocab())),
        bidwords(BidwordIndex::build(ads())),
        ann(model.config().tower_dims[1], {.subquantizers = 1, .centroids = 16}),
        parts(precompute_ad_parts(model, params, ads(), vocab())) {
    for (const auto& v : export_ad_vectors(model, params, ads(), vocab())) ann.add_ad(v.ad_id, v.vector);
    ann.train_pq();
  }

  static const std::vector<dataio::AdDescriptor>& ads() { return testing::small_corpus().corpus.ads; }
  static const dataio::Vocabulary& vocab() { return testing::small_corpus().vocab; }

  MatchingEngine engine(EngineConfig cfg = {}) const {
    return MatchingEngine(model, params, bidwords, &ann, &parts, catalog, cfg);
  }
};

const Serving& serving() {
  static const Serving s;
  return s;
}

std::vector<const model::ImpressionInstance*> requests() {
  return distinct_requests(testing::small_corpus().instances);
}

bool is_long_tail(const std::string& q) { return !q.empty() && q[0] == 'x'; }

TEST(NormalizeKeyword, LowercasesTrimsAndCollapses) {
  EXPECT_EQ(normalize_keyword("  Red   Running\tShoes "), "red running shoes");
  EXPECT_EQ(normalize_keyword(""), "");
  EXPECT_EQ(normalize_keyword("abc"), "abc");
}

TEST(BidwordIndex, EveryAdUnderEachKeyword) {
  const auto& s = serving();
  for (const auto& ad : Serving::ads()) {
    for (const auto& kw : ad.bid_keywords) {
      const auto hits = s.bidwords.lookup(kw);
      EXPECT_TRUE(std::binary_search(hits.begin(), hits.end(), ad.ad_id)) << kw;
      EXPECT_TRUE(std::is_sorted(hits.begin(), hits.end()));
    }
  }
  EXPECT_TRUE(s.bidwords.lookup("no such keyword at all").empty());
}

TEST(Offline, ExportedVectorsAreUnitNormAndDeterministic) {
  const auto& s = serving();
  const auto a = export_ad_vectors(s.model, s.params, Serving::ads(), Serving::vocab());
  const auto b = export_ad_vectors(s.model, s.params, Serving::ads(), Serving::vocab());
  ASSERT_EQ(a.size(), Serving::ads().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ad_id, b[i].ad_id);
    EXPECT_EQ(a[i].vector, b[i].vector);
    double n = 0;
    for (double x : a[i].vector) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-9);
  }
}

TEST(Offline, AdPartsTableCoversEveryAd) {
  const auto& s = serving();
  EXPECT_EQ(s.parts.size(), Serving::ads().size());
  EXPECT_EQ(s.parts.width(), s.model.config().prerank_hidden);
  const auto head = s.model.prerank_head(s.params);
  const std::vector<double> zero(s.model.config().tower_dims[1], 0.0);
  for (double x : model::ad_part(zero, head.weight)) EXPECT_EQ(x, 0.0);
  for (const auto& ad : Serving::ads()) {
    const auto want = model::ad_part(s.model.ad_vector(s.params, s.catalog.at(ad.ad_id).item), head.weight);
    EXPECT_EQ(*s.parts.find(ad.ad_id), want);
  }
}

TEST(Offline, AdPartsSaveLoad) {
  const auto& s = serving();
  testing::TempDir dir("parts");
  s.parts.save(dir / "p.bin");
  const auto back = AdPartsTable::load(dir / "p.bin");
  EXPECT_EQ(back.entries(), s.parts.entries());
  EXPECT_EQ(back.width(), s.parts.width());
}

TEST(Retrieve, KeywordMatchFindsBiddingAd) {
  const auto& s = serving();
  const auto engine = s.engine({.vector_path = false});
  const auto& ad = Serving::ads().front();
  const auto& req = *requests().front();
  const auto c = engine.retrieve(req.request, "  " + ad.bid_keywords.front() + " ");
  const auto it = std::find_if(c.begin(), c.end(), [&](const Candidate& x) { return x.ad_id == ad.ad_id; });
  ASSERT_NE(it, c.end());
  EXPECT_TRUE(it->has(Path::kKeyword));
  EXPECT_FALSE(it->has(Path::kVector));
  EXPECT_FALSE(it->retrieval_score.has_value());
}

TEST(Retrieve, BothPathsDedupeIntoOneCandidate) {
  const auto& s = serving();
  // The vector path returns the whole catalog, so every keyword hit is on both.
  const auto engine = s.engine({.k_vector = Serving::ads().size(), .overfetch = 1});
  const auto& ad = Serving::ads().front();
  const auto c = engine.retrieve(requests().front()->request, ad.bid_keywords.front());
  std::set<AdId> ids;
  for (const auto& x : c) {
    EXPECT_TRUE(ids.insert(x.ad_id).second);
    EXPECT_NE(x.paths, 0);
  }
  EXPECT_EQ(c.size(), Serving::ads().size());
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end(),
                             [](const Candidate& a, const Candidate& b) { return a.ad_id < b.ad_id; }));
  const auto it = std::find_if(c.begin(), c.end(), [&](const Candidate& x) { return x.ad_id == ad.ad_id; });
  ASSERT_NE(it, c.end());
  EXPECT_TRUE(it->has(Path::kKeyword));
  EXPECT_TRUE(it->has(Path::kVector));
  EXPECT_EQ(it->path_names(), (std::vector<std::string>{"KEYWORD", "VECTOR"}));
}

TEST(Retrieve, LongTailQueryOnlyReachableByVectorPath) {
  const auto& s = serving();
  const auto both = s.engine({.k_vector = 20});
  const auto keyword_only = s.engine({.vector_path = false});
  int seen = 0;
  for (const auto* r : requests()) {
    if (!is_long_tail(r->meta.raw_query)) continue;
    ++seen;
    EXPECT_TRUE(keyword_only.retrieve(r->request, r->meta.raw_query).empty());
    const auto c = both.retrieve(r->request, r->meta.raw_query);
    EXPECT_GT(c.size(), 0u);
    for (const auto& x : c) EXPECT_TRUE(x.has(Path::kVector));
  }
  EXPECT_GT(seen, 0);
}

TEST(Prerank, SplitScoresMatchDirect) {
  const auto& s = serving();
  const auto engine = s.engine({.k_vector = 50});
  const auto head = s.model.prerank_head(s.params);
  for (const auto* r : requests()) {
    const auto v_qu = s.model.qu_vector(s.params, r->request);
    const auto ranked = engine.prerank(r->request, engine.retrieve(r->request, r->meta.raw_query), 1000);
    for (const auto& c : ranked) {
      const auto v_a = s.model.ad_vector(s.params, s.catalog.at(c.ad_id).item);
      EXPECT_NEAR(c.prerank_score, model::prerank_prob_direct(head, v_qu, v_a), 1e-9);
      EXPECT_GT(c.prerank_score, 0.0);
      EXPECT_LT(c.prerank_score, 1.0);
    }
  }
}

TEST(Prerank, ReturnsAllSortedWhenNExceedsCandidates) {
  const auto& s = serving();
  const auto engine = s.engine({.k_vector = 30});
  const auto& r = *requests().front();
  const auto cands = engine.retrieve(r.request, r.meta.raw_query);
  const auto ranked = engine.prerank(r.request, cands, cands.size() + 10);
  ASSERT_EQ(ranked.size(), cands.size());
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    const auto& a = ranked[i - 1];
    const auto& b = ranked[i];
    EXPECT_TRUE(a.prerank_score > b.prerank_score || (a.prerank_score == b.prerank_score && a.ad_id < b.ad_id));
  }
  const auto top = engine.prerank(r.request, cands, 5);
  ASSERT_EQ(top.size(), std::min<std::size_t>(5, cands.size()));
  for (std::size_t i = 0; i < top.size(); ++i) EXPECT_EQ(top[i].ad_id, ranked[i].ad_id);
}

TEST(Prerank, QueryPartComputedOncePerRequest) {
  const auto& s = serving();
  const auto engine = s.engine({.k_vector = 40});
  const auto reqs = requests();
  for (std::size_t i = 0; i < 25; ++i) {
    const auto before = engine.stats().query_part_computations;
    engine.match(reqs[i]->request, reqs[i]->meta.raw_query);
    EXPECT_EQ(engine.stats().query_part_computations, before + 1);
  }
  EXPECT_EQ(engine.stats().requests, 25u);
  EXPECT_EQ(engine.stats().ad_part_fallbacks, 0u);
}

TEST(Prerank, MissingAdPartFallsBackToFullComputation) {
  const auto& s = serving();
  const AdPartsTable empty(s.parts.width());
  const MatchingEngine engine(s.model, s.params, s.bidwords, &s.ann, &empty, s.catalog, {.k_vector = 10});
  const auto with_table = s.engine({.k_vector = 10});
  const auto& r = *requests().front();
  const auto a = engine.match(r.request, r.meta.raw_query);
  const auto b = with_table.match(r.request, r.meta.raw_query);
  EXPECT_GT(engine.stats().ad_part_fallbacks, 0u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].prerank_score, b[i].prerank_score, 1e-12);
}

TEST(Metrics, FormulaExample) {
  const auto m = SimMetrics::from({.requests = 100, .presents = 200, .clicks = 10, .cost = 30.0});
  EXPECT_DOUBLE_EQ(*m.ctr, 0.05);
  EXPECT_DOUBLE_EQ(*m.pr, 2.0);
  EXPECT_DOUBLE_EQ(*m.cpc, 3.0);
  EXPECT_DOUBLE_EQ(*m.rpm, 0.15);
}

TEST(Metrics, ZeroDenominatorsAreUndefined) {
  const auto m = SimMetrics::from({.requests = 50, .presents = 0, .clicks = 0, .cost = 0.0});
  EXPECT_EQ(*m.pr, 0.0);
  EXPECT_FALSE(m.ctr.has_value());
  EXPECT_FALSE(m.cpc.has_value());
  EXPECT_FALSE(m.rpm.has_value());
  EXPECT_FALSE(SimMetrics::from({}).pr.has_value());
}

TEST(Simulate, NoPresentsGivesZeroPr) {
  const auto& s = serving();
  // Only long-tail requests with the vector path off: nothing is ever shown.
  std::vector<const model::ImpressionInstance*> tail;
  for (const auto* r : requests()) {
    if (is_long_tail(r->meta.raw_query)) tail.push_back(r);
  }
  ASSERT_FALSE(tail.empty());
  const auto engine = s.engine({.vector_path = false});
  const auto res = simulate(engine, tail, s.catalog, {});
  EXPECT_EQ(res.counters.presents, 0u);
  EXPECT_EQ(*res.metrics.pr, 0.0);
  EXPECT_FALSE(res.metrics.ctr.has_value());
  EXPECT_TRUE(metrics_json(res, engine.config())["ctr"].is_null());
}

TEST(Simulate, VectorPathRaisesPr) {
  const auto& s = serving();
  const auto reqs = requests();
  const auto on = s.engine({.k_vector = 20});
  const auto off = s.engine({.vector_path = false});
  const auto a = simulate(on, reqs, s.catalog, {});
  const auto b = simulate(off, reqs, s.catalog, {});
  EXPECT_GE(*a.metrics.pr, *b.metrics.pr);
  EXPECT_GT(*a.metrics.pr, *b.metrics.pr);  // long-tail requests get ads only through vectors
}

TEST(Simulate, DeterministicAndSplitExact) {
  const auto& s = serving();
  const auto reqs = requests();
  const auto e1 = s.engine({.k_vector = 20, .verify_split = true});
  const auto e2 = s.engine({.k_vector = 20, .verify_split = true});
  const auto a = simulate(e1, reqs, s.catalog, {.seed = 5});
  const auto b = simulate(e2, reqs, s.catalog, {.seed = 5});
  ASSERT_EQ(a.impressions.size(), b.impressions.size());
  for (std::size_t i = 0; i < a.impressions.size(); ++i) {
    EXPECT_EQ(a.impressions[i].candidate.ad_id, b.impressions[i].candidate.ad_id);
    EXPECT_EQ(a.impressions[i].clicked, b.impressions[i].clicked);
  }
  EXPECT_EQ(metrics_json(a, e1.config()).dump(), metrics_json(b, e2.config()).dump());
  EXPECT_EQ(a.engine.query_part_computations, reqs.size());
  EXPECT_GT(a.engine.split_checks, 0u);
  EXPECT_LE(a.engine.max_split_deviation, 1e-9);
}

TEST(Simulate, DistinctRequestsKeepsFirstOfEachImpressionGroup) {
  const auto& inst = testing::small_corpus().instances;
  const auto reqs = requests();
  std::set<std::pair<std::string, std::int64_t>> keys;
  for (const auto& i : inst) keys.emplace(i.meta.user_id, i.meta.timestamp);
  EXPECT_EQ(reqs.size(), keys.size());
}

}  // namespace
}  // namespace admatch::pipeline
