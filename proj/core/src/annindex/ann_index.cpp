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

#include "admatch/annindex/ann_index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "admatch/common/binary_io.hpp"
#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/numkit/tensor.hpp"

namespace admatch::annindex {
namespace {

constexpr std::string_view kMagic = "ADMANN01";
constexpr std::uint32_t kVersion = 1;

bool ranks_before(const SearchHit& a, const SearchHit& b) {
  return a.score != b.score ? a.score > b.score : a.ad_id < b.ad_id;
}

std::vector<double> unit(std::span<const double> v, std::size_t dim) {
  if (v.size() != dim) {
    throw DimensionError(fmt::format("vector of length {} for a {}-d index", v.size(), dim));
  }
  const double n = numkit::l2_norm(v);
  if (n == 0.0 || !std::isfinite(n)) throw DegenerateVectorError("cannot index a zero-norm vector");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

}  // namespace

double blocked_dot(std::span<const double> a, std::span<const double> b, std::size_t blocks) {
  const std::size_t sub = a.size() / blocks;
  double total = 0.0;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    double s = 0.0;
    for (std::size_t j = blk * sub; j < (blk + 1) * sub; ++j) s += a[j] * b[j];
    total += s;
  }
  return total;
}

std::vector<SearchHit> select_top(std::vector<SearchHit> hits, std::size_t k) {
  k = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                    ranks_before);
  hits.resize(k);
  return hits;
}

double recall_at_k(std::span<const SearchHit> approx, std::span<const SearchHit> exact) {
  if (exact.empty()) return 1.0;
  std::unordered_set<AdId> want;
  for (const auto& h : exact) want.insert(h.ad_id);
  std::size_t found = 0;
  for (const auto& h : approx) found += want.count(h.ad_id);
  return static_cast<double>(found) / static_cast<double>(exact.size());
}

AnnIndex::AnnIndex(std::size_t dim, PqConfig config) : dim_(dim), config_(config) {
  if (dim == 0 || config.subquantizers == 0 || dim % config.subquantizers != 0) {
    throw ConfigError(fmt::format("dimension {} is not divisible into {} subquantizers", dim,
                                  config.subquantizers));
  }
  if (config.centroids == 0 || config.centroids > 256) {
    throw ConfigError("centroid count must lie in [1, 256]");
  }
  auto s = std::make_shared<Snapshot>();
  s->dim = dim;
  s->blocks = config.subquantizers;
  current_ = std::move(s);
}

std::shared_ptr<const Snapshot> AnnIndex::snapshot() const { return std::atomic_load(&current_); }

void AnnIndex::publish(std::shared_ptr<const Snapshot> next) { std::atomic_store(&current_, std::move(next)); }

void AnnIndex::add_ad(AdId id, std::span<const double> vector) {
  const AdId ids[] = {id};
  add_ads(ids, vector);
}

void AnnIndex::add_ads(std::span<const AdId> ids, std::span<const double> vectors) {
  if (vectors.size() != ids.size() * dim_) {
    throw DimensionError(fmt::format("{} ids but {} values for a {}-d index", ids.size(),
                                     vectors.size(), dim_));
  }
  std::lock_guard lock(*write_mutex_);
  auto next = std::make_shared<Snapshot>(*snapshot());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::vector<double> v = unit(vectors.subspan(i * dim_, dim_), dim_);
    std::size_t pos;
    if (auto it = next->position.find(ids[i]); it != next->position.end()) {
      log::warn(fmt::format("ad {} already indexed; replacing its vector", ids[i]));
      pos = it->second;
      std::copy(v.begin(), v.end(), next->vectors.begin() + static_cast<std::ptrdiff_t>(pos * dim_));
    } else {
      pos = next->ids.size();
      next->ids.push_back(ids[i]);
      next->position.emplace(ids[i], pos);
      next->vectors.insert(next->vectors.end(), v.begin(), v.end());
      if (next->pq) next->codes.resize(next->codes.size() + next->blocks);
    }
    if (next->pq) {
      next->pq->encode_into(v, std::span(next->codes).subspan(pos * next->blocks, next->blocks));
    }
  }
  publish(std::move(next));
}

void AnnIndex::train_pq() {
  std::lock_guard lock(*write_mutex_);
  auto next = std::make_shared<Snapshot>(*snapshot());
  next->pq = ProductQuantizer::train(next->vectors, dim_, config_);
  next->codes.assign(next->size() * next->blocks, 0);
  for (std::size_t i = 0; i < next->size(); ++i) {
    next->pq->encode_into(next->vector(i), std::span(next->codes).subspan(i * next->blocks, next->blocks));
  }
  publish(std::move(next));
}

std::vector<SearchHit> AnnIndex::exact_topk(std::span<const double> q, std::size_t k) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (q.size() != dim_) throw DimensionError("query dimension mismatch");
  const auto snap = snapshot();
  std::vector<SearchHit> hits;
  hits.reserve(snap->size());
  for (std::size_t i = 0; i < snap->size(); ++i) {
    hits.push_back({snap->ids[i], blocked_dot(q, snap->vector(i), snap->blocks)});
  }
  return select_top(std::move(hits), k);
}

std::vector<SearchHit> AnnIndex::pq_search(std::span<const double> q, std::size_t k,
                                           std::size_t overfetch, bool rerank) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (overfetch == 0) throw std::invalid_argument("overfetch factor must be at least 1");
  if (q.size() != dim_) throw DimensionError("query dimension mismatch");
  const auto snap = snapshot();
  if (!snap->pq) {
    log::info("no product quantizer trained; using exact search");
    return exact_topk(q, k);
  }
  const std::vector<double> table = snap->pq->inner_product_table(q);
  std::vector<SearchHit> hits;
  hits.reserve(snap->size());
  for (std::size_t i = 0; i < snap->size(); ++i) {
    hits.push_back({snap->ids[i], snap->pq->score(table, snap->code(i))});
  }
  if (!rerank) return select_top(std::move(hits), k);
  std::vector<SearchHit> shortlist = select_top(std::move(hits), k * overfetch);
  for (auto& h : shortlist) {
    h.score = blocked_dot(q, snap->vector(snap->position.at(h.ad_id)), snap->blocks);
  }
  return select_top(std::move(shortlist), k);
}

std::vector<double> AnnIndex::vector_of(AdId id) const {
  const auto snap = snapshot();
  auto it = snap->position.find(id);
  if (it == snap->position.end()) throw NotFoundError(fmt::format("ad {} not indexed", id));
  const auto v = snap->vector(it->second);
  return {v.begin(), v.end()};
}

void AnnIndex::save(const std::filesystem::path& path) const {
  const auto snap = snapshot();
  io::BinaryWriter w(path);
  w.write_magic(kMagic);
  w.write_u32(kVersion);
  w.write_u64(dim_);
  w.write_u64(config_.subquantizers);
  w.write_u64(config_.centroids);
  w.write_u64(config_.iterations);
  w.write_u64(config_.seed);
  w.write_u64(snap->size());
  w.write_u8(snap->pq ? 1 : 0);
  if (snap->pq) {
    w.write_f64s(snap->pq->codebooks());
    w.write_f64s(snap->pq->cell_diameters());
    w.write_bytes(snap->codes);
  }
  w.write_f64s(snap->vectors);
  for (AdId id : snap->ids) w.write_u64(id);
  w.finish();
}

AnnIndex AnnIndex::load(const std::filesystem::path& path) {
  io::BinaryReader r(path);
  r.expect_magic(kMagic);
  if (const auto v = r.read_u32(); v != kVersion) {
    throw FormatError(fmt::format("{}: unsupported index version {}", path.string(), v));
  }
  const std::size_t dim = r.read_u64();
  PqConfig cfg;
  cfg.subquantizers = r.read_u64();
  cfg.centroids = r.read_u64();
  cfg.iterations = r.read_u64();
  cfg.seed = r.read_u64();
  const std::size_t count = r.read_u64();
  const bool has_pq = r.read_u8() != 0;
  AnnIndex index(dim, cfg);
  auto snap = std::make_shared<Snapshot>(*index.snapshot());
  if (has_pq) {
    const std::size_t sub = dim / cfg.subquantizers;
    auto books = r.read_f64s(cfg.subquantizers * cfg.centroids * sub);
    auto diam = r.read_f64s(cfg.subquantizers);
    snap->pq.emplace(dim, cfg.subquantizers, cfg.centroids, std::move(books), std::move(diam));
    snap->codes = r.read_bytes(count * cfg.subquantizers);
    for (std::uint8_t c : snap->codes) {
      if (c >= cfg.centroids) throw FormatError(path.string() + ": code out of range");
    }
  }
  snap->vectors = r.read_f64s(count * dim);
  for (std::size_t i = 0; i < count; ++i) {
    const AdId id = r.read_u64();
    if (!snap->position.emplace(id, i).second) {
      throw FormatError(fmt::format("{}: duplicate ad id {}", path.string(), id));
    }
    snap->ids.push_back(id);
  }
  r.expect_end();
  index.publish(std::move(snap));
  return index;
}

}  // namespace admatch::annindex
