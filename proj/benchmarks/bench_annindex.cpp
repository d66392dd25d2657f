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

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "admatch/annindex/ann_index.hpp"

namespace {

using admatch::annindex::AdId;
using admatch::annindex::AnnIndex;

constexpr std::size_t kDim = 128;

std::vector<double> unit_vectors(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n * kDim);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < kDim; ++j) s += (v[i * kDim + j] = g(rng)) * v[i * kDim + j];
    for (std::size_t j = 0; j < kDim; ++j) v[i * kDim + j] /= std::sqrt(s);
  }
  return v;
}

AnnIndex make_index(std::size_t n) {
  AnnIndex idx(kDim);
  const auto data = unit_vectors(n, 1);
  std::vector<AdId> ids(n);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  idx.add_ads(ids, data);
  idx.train_pq();
  return idx;
}

const AnnIndex& shared_index() {
  static const AnnIndex index = make_index(10000);
  return index;
}

void BM_ExactTopK(benchmark::State& state) {
  const auto& index = shared_index();
  const auto q = unit_vectors(1, 99);
  for (auto _ : state) benchmark::DoNotOptimize(index.exact_topk(q, 10));
}
BENCHMARK(BM_ExactTopK)->Unit(benchmark::kMicrosecond);

void BM_PqSearch(benchmark::State& state) {
  const auto& index = shared_index();
  const auto q = unit_vectors(1, 99);
  const auto overfetch = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(index.pq_search(q, 10, overfetch));
}
BENCHMARK(BM_PqSearch)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_AddAd(benchmark::State& state) {
  AnnIndex index = make_index(state.range(0));
  const auto v = unit_vectors(1, 5);
  AdId id = 1'000'000;
  for (auto _ : state) index.add_ad(id++, v);
}
BENCHMARK(BM_AddAd)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->Iterations(20);

}  // namespace
