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
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "admatch/annindex/product_quantizer.hpp"

namespace admatch::annindex {

using AdId = std::uint64_t;

struct SearchHit {
  AdId ad_id = 0;
  double score = 0.0;
  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Immutable view of the index. Searches run against one snapshot, so a
// concurrent add never shows up half-applied.
struct Snapshot {
  std::size_t dim = 0;
  std::size_t blocks = 1;  // M; exact scores are summed block by block
  std::optional<ProductQuantizer> pq;
  std::vector<AdId> ids;
  std::vector<double> vectors;     // ids.size() x dim, unit norm
  std::vector<std::uint8_t> codes;  // ids.size() x M when pq is set
  std::unordered_map<AdId, std::size_t> position;

  std::size_t size() const { return ids.size(); }
  std::span<const double> vector(std::size_t i) const {
    return std::span(vectors).subspan(i * dim, dim);
  }
  std::span<const std::uint8_t> code(std::size_t i) const {
    return std::span(codes).subspan(i * blocks, blocks);
  }
};

// Inner product summed over `blocks` equal slices, in slice order. This
// matches the summation order of PQ lookup-table scores, so a codebook that
// holds the data exactly scores bit-for-bit like the exact path.
double blocked_dot(std::span<const double> a, std::span<const double> b, std::size_t blocks);

// Cosine search over unit vectors keyed by ad id, with optional product
// quantization. Readers take a snapshot pointer; writers build a new
// snapshot and publish it atomically.
class AnnIndex {
 public:
  // Throws ConfigError unless dim is divisible by config.subquantizers.
  AnnIndex(std::size_t dim, PqConfig config = {});

  std::size_t dim() const { return dim_; }
  const PqConfig& config() const { return config_; }
  std::size_t size() const { return snapshot()->size(); }
  bool has_pq() const { return snapshot()->pq.has_value(); }
  std::shared_ptr<const Snapshot> snapshot() const;

  // Normalizes and stores the vector, encoding it against the current
  // codebooks. A duplicate id replaces the old entry with a warning. Throws
  // DimensionError on a wrong length and DegenerateVectorError on a zero
  // vector.
  void add_ad(AdId id, std::span<const double> vector);
  // Bulk add; one snapshot swap.
  void add_ads(std::span<const AdId> ids, std::span<const double> vectors);

  // (Re)trains codebooks on every stored vector and re-encodes all entries.
  void train_pq();
  void rebuild() { train_pq(); }

  // `q` should be unit-norm. Scores descend; ties go to the smaller id.
  std::vector<SearchHit> exact_topk(std::span<const double> q, std::size_t k) const;
  // ADC search: lookup-table scores over the codes, the best
  // k * overfetch candidates re-scored exactly when `rerank` is set. Falls
  // back to exact_topk with a notice when no quantizer is trained.
  std::vector<SearchHit> pq_search(std::span<const double> q, std::size_t k,
                                   std::size_t overfetch = 10, bool rerank = true) const;

  std::vector<double> vector_of(AdId id) const;

  void save(const std::filesystem::path& path) const;
  static AnnIndex load(const std::filesystem::path& path);

 private:
  void publish(std::shared_ptr<const Snapshot> next);

  std::size_t dim_;
  PqConfig config_;
  std::shared_ptr<const Snapshot> current_;
  std::unique_ptr<std::mutex> write_mutex_ = std::make_unique<std::mutex>();
};

// Top k of `hits` by (score desc, id asc), in that order.
std::vector<SearchHit> select_top(std::vector<SearchHit> hits, std::size_t k);

double recall_at_k(std::span<const SearchHit> approx, std::span<const SearchHit> exact);

}  // namespace admatch::annindex
