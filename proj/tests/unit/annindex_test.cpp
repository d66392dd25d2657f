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
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include "admatch/annindex/ann_index.hpp"
#include "admatch/annindex/product_quantizer.hpp"
#include "admatch/common/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace admatch::annindex {
namespace {

std::vector<double> gaussian(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n * dim);
  for (auto& x : v) x = nd(g);
  return v;
}

std::vector<double> unit(std::vector<double> v) {
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
  return v;
}

AnnIndex random_index(std::size_t n, std::size_t dim, PqConfig cfg, std::uint64_t seed) {
  AnnIndex idx(dim, cfg);
  const auto data = gaussian(n, dim, seed);
  std::vector<AdId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = 1000 + i;
  idx.add_ads(ids, data);
  idx.train_pq();
  return idx;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

TEST(AnnIndex, StoredVectorsAreUnitNorm) {
  AnnIndex idx(8, {.subquantizers = 2, .centroids = 4});
  const auto data = gaussian(30, 8, 5);
  for (std::size_t i = 0; i < 30; ++i) {
    idx.add_ad(i, std::span(data).subspan(i * 8, 8));
    if (i == 10) idx.train_pq();
  }
  idx.add_ad(3, std::vector<double>(8, 7.0));  // replaces id 3
  const auto snap = idx.snapshot();
  EXPECT_EQ(snap->size(), 30u);
  for (std::size_t i = 0; i < snap->size(); ++i) {
    double n = 0;
    for (double x : snap->vector(i)) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-12);
  }
}

TEST(AnnIndex, RejectsBadInput) {
  EXPECT_THROW(AnnIndex(10, {.subquantizers = 3}), ConfigError);
  AnnIndex idx(4, {.subquantizers = 2, .centroids = 4});
  EXPECT_THROW(idx.add_ad(1, std::vector<double>(3, 1.0)), DimensionError);
  EXPECT_THROW(idx.add_ad(1, std::vector<double>(4, 0.0)), DegenerateVectorError);
  EXPECT_THROW(idx.vector_of(99), NotFoundError);
}

TEST(ExactTopK, HandPlacedAngles) {
  AnnIndex idx(2, {.subquantizers = 1, .centroids = 2});
  const double pi = std::acos(-1.0);
  idx.add_ad(7, std::vector<double>{0.0, 1.0});                            // 90 deg
  idx.add_ad(8, std::vector<double>{std::cos(pi / 3), std::sin(pi / 3)});  // 60 deg
  idx.add_ad(9, std::vector<double>{2.0, 0.0});                            // 0 deg
  const std::vector<double> q = {1.0, 0.0};
  const auto hits = idx.exact_topk(q, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].ad_id, 9u);
  EXPECT_EQ(hits[1].ad_id, 8u);
  EXPECT_EQ(hits[2].ad_id, 7u);
  EXPECT_EQ(hits[0].score, 1.0);
  EXPECT_NEAR(hits[1].score, 0.5, 1e-15);
  EXPECT_NEAR(hits[2].score, 0.0, 1e-15);
  EXPECT_EQ(idx.exact_topk(q, 50).size(), 3u);
}

TEST(ExactTopK, EmptyIndexGivesNoHits) {
  AnnIndex idx(4, {.subquantizers = 2});
  EXPECT_TRUE(idx.exact_topk(unit({1, 0, 0, 0}), 5).empty());
}

TEST(ExactTopK, EqualsSelectionOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    AnnIndex idx(8, {.subquantizers = 4, .centroids = 4});
    // Rounded coordinates give duplicate vectors and exact score ties.
    auto data = gaussian(300, 8, seed);
    for (auto& x : data) x = std::round(x);
    std::vector<AdId> ids;
    std::vector<double> kept;
    for (std::size_t i = 0; i < 300; ++i) {
      auto row = std::span(data).subspan(i * 8, 8);
      bool zero = true;
      for (double x : row) zero = zero && x == 0.0;
      if (zero) continue;
      ids.push_back(5000 - 3 * i);
      kept.insert(kept.end(), row.begin(), row.end());
    }
    idx.add_ads(ids, kept);
    const auto snap = idx.snapshot();
    for (int t = 0; t < 10; ++t) {
      const auto q = unit(std::vector<double>(kept.begin() + 8 * t, kept.begin() + 8 * t + 8));
      std::vector<std::pair<std::uint64_t, double>> scored;
      for (std::size_t i = 0; i < snap->size(); ++i) {
        scored.emplace_back(snap->ids[i], oracle::block_sum_dot(q, snap->vector(i), 4));
      }
      const auto want = oracle::selection_topk(scored, 25);
      const auto got = idx.exact_topk(q, 25);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].ad_id, want[i].first);
        EXPECT_EQ(got[i].score, want[i].second);
      }
    }
  }
}

TEST(ExactTopK, StoredQueryRanksFirst) {
  auto idx = random_index(500, 16, {.subquantizers = 4, .centroids = 16}, 9);
  const auto v = idx.vector_of(1234);
  const auto hits = idx.exact_topk(v, 1);
  EXPECT_EQ(hits[0].ad_id, 1234u);
  EXPECT_NEAR(hits[0].score, 1.0, 1e-12);
}

TEST(ProductQuantizer, TooFewVectors) {
  const auto data = gaussian(10, 4, 1);
  EXPECT_THROW(ProductQuantizer::train(data, 4, {.subquantizers = 2, .centroids = 16}),
               QuantizerTrainingError);
  EXPECT_THROW(ProductQuantizer::train(data, 4, {.subquantizers = 3, .centroids = 2}),
               ConfigError);
}

// Each 2-d block takes one of four axis directions, so k = 4 cells hold the
// data exactly. Four blocks give norm 2, keeping every coordinate a binary
// fraction so cell means are exact.
AnnIndex degenerate_index() {
  AnnIndex idx(8, {.subquantizers = 4, .centroids = 4, .iterations = 25, .seed = 3});
  const double dirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::mt19937_64 g(17);
  for (AdId id = 0; id < 60; ++id) {
    std::vector<double> v;
    for (int b = 0; b < 4; ++b) {
      const auto a = g() % 4;
      v.insert(v.end(), {dirs[a][0], dirs[a][1]});
    }
    idx.add_ad(id, v);
  }
  idx.train_pq();
  return idx;
}

TEST(ProductQuantizer, DegenerateCodebookHasZeroError) {
  const auto idx = degenerate_index();
  const auto snap = idx.snapshot();
  ASSERT_TRUE(snap->pq.has_value());
  EXPECT_EQ(snap->pq->error_trace().back(), 0.0);
  for (std::size_t i = 0; i < snap->size(); ++i) {
    EXPECT_EQ(squared_distance(snap->pq->decode(snap->code(i)), snap->vector(i)), 0.0);
  }
}

TEST(PqSearch, ZeroErrorCodebookMatchesExact) {
  const auto idx = degenerate_index();
  std::mt19937_64 g(23);
  for (int t = 0; t < 20; ++t) {
    const auto q = unit(gaussian(1, 8, g()));
    EXPECT_EQ(idx.pq_search(q, 10, 1, false), idx.exact_topk(q, 10));
  }
}

TEST(ProductQuantizer, LloydErrorNeverIncreases) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto data = gaussian(2000, 32, seed);
    const auto pq = ProductQuantizer::train(data, 32, {.subquantizers = 8, .centroids = 32, .seed = seed});
    const auto& trace = pq.error_trace();
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1]);
  }
}

TEST(ProductQuantizer, BeatsRandomCodebookBaseline) {
  const std::size_t n = 10000, d = 128, m = 16, k = 256;
  const auto data = gaussian(n, d, 31);
  const auto pq = ProductQuantizer::train(data, d, {.subquantizers = m, .centroids = k});
  // Baseline: each block's codebook is k data points picked at random.
  std::mt19937_64 g(37);
  std::vector<double> books(m * k * (d / m));
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t row = g() % n;
      for (std::size_t j = 0; j < d / m; ++j) {
        books[(b * k + c) * (d / m) + j] = data[row * d + b * (d / m) + j];
      }
    }
  }
  const ProductQuantizer baseline(d, m, k, books, std::vector<double>(m, 0.0));
  double trained = 0, random = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = std::span(data).subspan(i * d, d);
    trained += squared_distance(pq.decode(pq.encode(v)), v);
    random += squared_distance(baseline.decode(baseline.encode(v)), v);
  }
  EXPECT_LT(trained / n, random / n);
}

TEST(PqSearch, ExhaustiveRerankMatchesExact) {
  const auto idx = random_index(1000, 32, {.subquantizers = 8, .centroids = 16}, 41);
  std::mt19937_64 g(43);
  for (int t = 0; t < 20; ++t) {
    const auto q = unit(gaussian(1, 32, g()));
    EXPECT_EQ(idx.pq_search(q, 10, 100, true), idx.exact_topk(q, 10));
  }
}

TEST(PqSearch, RecallNonDecreasingInOverfetch) {
  const auto idx = random_index(3000, 32, {.subquantizers = 8, .centroids = 32}, 47);
  std::mt19937_64 g(53);
  std::vector<std::vector<double>> queries;
  for (int t = 0; t < 30; ++t) queries.push_back(unit(gaussian(1, 32, g())));
  double prev = -1;
  for (std::size_t f : {1u, 2u, 4u, 8u, 16u, 64u}) {
    double sum = 0;
    for (const auto& q : queries) {
      const auto exact = idx.exact_topk(q, 10);
      const auto approx = idx.pq_search(q, 10, f, true);
      const double r = recall_at_k(approx, exact);
      sum += r;
    }
    EXPECT_GE(sum, prev) << "overfetch " << f;
    prev = sum;
  }
}

TEST(PqSearch, FallsBackToExactWithoutQuantizer) {
  AnnIndex idx(8, {.subquantizers = 2, .centroids = 4});
  const auto data = gaussian(20, 8, 59);
  for (std::size_t i = 0; i < 20; ++i) idx.add_ad(i, std::span(data).subspan(i * 8, 8));
  const auto q = unit(gaussian(1, 8, 61));
  EXPECT_EQ(idx.pq_search(q, 5), idx.exact_topk(q, 5));
}

TEST(AddAd, SearchableImmediatelyAndCountsUp) {
  auto idx = random_index(800, 16, {.subquantizers = 4, .centroids = 16}, 67);
  const auto v = gaussian(1, 16, 71);
  idx.add_ad(42, v);
  EXPECT_EQ(idx.size(), 801u);
  const auto q = unit(v);
  EXPECT_EQ(idx.exact_topk(q, 1)[0].ad_id, 42u);
  EXPECT_EQ(idx.pq_search(q, 1)[0].ad_id, 42u);
  idx.add_ad(42, gaussian(1, 16, 73));  // duplicate id replaces
  EXPECT_EQ(idx.size(), 801u);
}

TEST(AddAd, ReconstructionErrorWithinCellDiameter) {
  auto idx = random_index(2000, 16, {.subquantizers = 4, .centroids = 16}, 79);
  const auto pq = *idx.snapshot()->pq;
  const double diameter = *std::max_element(pq.cell_diameters().begin(), pq.cell_diameters().end());
  for (AdId id = 1; id <= 100; ++id) idx.add_ad(id, gaussian(1, 16, 100 + id));
  const auto snap = idx.snapshot();
  ASSERT_EQ(snap->pq->codebooks().size(), pq.codebooks().size());
  EXPECT_TRUE(std::equal(pq.codebooks().begin(), pq.codebooks().end(),
                         snap->pq->codebooks().begin()));  // not retrained
  for (AdId id = 1; id <= 100; ++id) {
    const auto i = snap->position.at(id);
    const auto rec = snap->pq->decode(snap->code(i));
    for (std::size_t b = 0; b < 4; ++b) {
      const double dist = std::sqrt(squared_distance(std::span(rec).subspan(4 * b, 4),
                                                     snap->vector(i).subspan(4 * b, 4)));
      EXPECT_LE(dist, diameter);
    }
  }
}

TEST(AnnIndex, SaveLoadRoundTrip) {
  const auto idx = random_index(600, 16, {.subquantizers = 4, .centroids = 16}, 83);
  testing::TempDir dir("ann");
  idx.save(dir / "a.idx");
  const auto back = AnnIndex::load(dir / "a.idx");
  const auto a = idx.snapshot(), b = back.snapshot();
  EXPECT_EQ(a->ids, b->ids);
  EXPECT_EQ(a->codes, b->codes);
  ASSERT_EQ(a->vectors.size(), b->vectors.size());
  for (std::size_t i = 0; i < a->vectors.size(); ++i) {
    EXPECT_NEAR(a->vectors[i], b->vectors[i], 1e-6);
  }
  const auto q = unit(gaussian(1, 16, 89));
  EXPECT_EQ(idx.pq_search(q, 10, 3, false), back.pq_search(q, 10, 3, false));
  back.save(dir / "b.idx");
  EXPECT_EQ(testing::read_bytes(dir / "a.idx"), testing::read_bytes(dir / "b.idx"));
}

TEST(AnnIndex, LoadRejectsGarbage) {
  testing::TempDir dir("ann-bad");
  { std::ofstream(dir / "x.idx") << "not an index"; }
  EXPECT_THROW(AnnIndex::load(dir / "x.idx"), FormatError);
}

TEST(AnnIndex, ConcurrentReadersSeeWholeSnapshots) {
  auto idx = random_index(300, 8, {.subquantizers = 2, .centroids = 8}, 97);
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    const auto q = unit(gaussian(1, 8, 101));
    while (!stop) {
      const auto snap = idx.snapshot();
      if (snap->vectors.size() != snap->size() * 8 || snap->codes.size() != snap->size() * 2) ++bad;
      if (idx.exact_topk(q, 5).size() != 5) ++bad;
    }
  });
  for (AdId id = 1; id <= 200; ++id) idx.add_ad(id, gaussian(1, 8, 200 + id));
  stop = true;
  reader.join();
  EXPECT_EQ(bad, 0);
  EXPECT_EQ(idx.size(), 500u);
}

}  // namespace
}  // namespace admatch::annindex
