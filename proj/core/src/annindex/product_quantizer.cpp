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

#include "admatch/annindex/product_quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "admatch/common/error.hpp"
#include "admatch/common/random.hpp"

namespace admatch::annindex {
namespace {

double sq_dist(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const double* x, const double* book, std::size_t k, std::size_t sub,
                    double* best_out = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double d = sq_dist(x, book + c * sub, sub);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_out) *best_out = best_d;
  return best;
}

struct BlockResult {
  std::vector<double> centroids;  // k x sub
  std::vector<double> trace;
  double diameter = 0.0;
};

// k-means on the n points of one block, gathered into `pts` (n x sub).
BlockResult kmeans(const std::vector<double>& pts, std::size_t n, std::size_t sub, std::size_t k,
                   std::size_t iterations, Rng& rng) {
  BlockResult r;
  r.centroids.assign(k * sub, 0.0);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.index(n);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(pts.begin() + static_cast<std::ptrdiff_t>(pick * sub), sub,
                r.centroids.begin() + static_cast<std::ptrdiff_t>(c * sub));
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(&pts[i * sub], &r.centroids[c * sub], sub));
      total += d2[i];
    }
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave the last point chosen even if it is already covered.
      while (d2[pick] <= 0.0 && pick > 0) --pick;
    } else {
      pick = rng.index(n);
    }
  }

  std::vector<std::size_t> assign(n, k);
  std::vector<double> sums(k * sub);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it <= iterations; ++it) {
    bool changed = false;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      const std::size_t c = nearest(&pts[i * sub], r.centroids.data(), k, sub, &d);
      err += d;
      if (c != assign[i]) {
        assign[i] = c;
        changed = true;
      }
    }
    r.trace.push_back(err);
    if (!changed || it == iterations) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t j = 0; j < sub; ++j) sums[assign[i] * sub + j] += pts[i * sub + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < sub; ++j) {
        r.centroids[c * sub + j] = sums[c * sub + j] / static_cast<double>(counts[c]);
      }
    }
  }

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) members[assign[i]].push_back(i);
  for (const auto& cell : members) {
    for (std::size_t a = 0; a < cell.size(); ++a) {
      for (std::size_t b = a + 1; b < cell.size(); ++b) {
        r.diameter = std::max(r.diameter, std::sqrt(sq_dist(&pts[cell[a] * sub], &pts[cell[b] * sub], sub)));
      }
    }
  }
  return r;
}

}  // namespace

ProductQuantizer ProductQuantizer::train(std::span<const double> data, std::size_t dim,
                                         const PqConfig& config) {
  const std::size_t m = config.subquantizers, k = config.centroids;
  if (dim == 0 || m == 0 || dim % m != 0) {
    throw ConfigError(fmt::format("dimension {} is not divisible into {} subquantizers", dim, m));
  }
  if (k == 0 || k > 256) throw ConfigError(fmt::format("centroid count {} outside [1, 256]", k));
  if (data.size() % dim != 0) throw DimensionError("training data is not a whole number of vectors");
  const std::size_t n = data.size() / dim;
  if (n < k) {
    throw QuantizerTrainingError(fmt::format("{} training vectors for {} centroids", n, k));
  }

  ProductQuantizer pq;
  pq.dim_ = dim;
  pq.m_ = m;
  pq.k_ = k;
  const std::size_t sub = dim / m;
  pq.codebooks_.resize(m * k * sub);
  std::vector<std::vector<double>> traces;
  std::vector<double> pts(n * sub);
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(i * dim + b * sub), sub,
                  pts.begin() + static_cast<std::ptrdiff_t>(i * sub));
    }
    Rng rng(mix_seed(config.seed, b));
    BlockResult r = kmeans(pts, n, sub, k, config.iterations, rng);
    std::copy(r.centroids.begin(), r.centroids.end(),
              pq.codebooks_.begin() + static_cast<std::ptrdiff_t>(b * k * sub));
    pq.cell_diameters_.push_back(r.diameter);
    traces.push_back(std::move(r.trace));
  }
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());
  pq.error_trace_.assign(longest, 0.0);
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < longest; ++i) pq.error_trace_[i] += t[std::min(i, t.size() - 1)];
  }
  return pq;
}

ProductQuantizer::ProductQuantizer(std::size_t dim, std::size_t m, std::size_t k,
                                   std::vector<double> codebooks,
                                   std::vector<double> cell_diameters)
    : dim_(dim), m_(m), k_(k), codebooks_(std::move(codebooks)),
      cell_diameters_(std::move(cell_diameters)) {
  if (dim_ == 0 || m_ == 0 || dim_ % m_ != 0 || k_ == 0 || k_ > 256 ||
      codebooks_.size() != m_ * k_ * (dim_ / m_) || cell_diameters_.size() != m_) {
    throw FormatError("inconsistent product quantizer parts");
  }
}

std::span<const double> ProductQuantizer::centroid(std::size_t block, std::size_t c) const {
  const std::size_t sub = sub_dim();
  return std::span(codebooks_).subspan((block * k_ + c) * sub, sub);
}

void ProductQuantizer::encode_into(std::span<const double> v, std::span<std::uint8_t> out) const {
  if (v.size() != dim_ || out.size() != m_) {
    throw DimensionError(fmt::format("encode: vector of {} for a {}-d quantizer", v.size(), dim_));
  }
  const std::size_t sub = sub_dim();
  for (std::size_t b = 0; b < m_; ++b) {
    out[b] = static_cast<std::uint8_t>(
        nearest(v.data() + b * sub, codebooks_.data() + b * k_ * sub, k_, sub));
  }
}

std::vector<std::uint8_t> ProductQuantizer::encode(std::span<const double> v) const {
  std::vector<std::uint8_t> out(m_);
  encode_into(v, out);
  return out;
}

std::vector<double> ProductQuantizer::decode(std::span<const std::uint8_t> codes) const {
  if (codes.size() != m_) throw DimensionError("decode: wrong code length");
  std::vector<double> out;
  out.reserve(dim_);
  for (std::size_t b = 0; b < m_; ++b) {
    const auto c = centroid(b, codes[b]);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<double> ProductQuantizer::inner_product_table(std::span<const double> q) const {
  if (q.size() != dim_) throw DimensionError("query dimension mismatch");
  const std::size_t sub = sub_dim();
  std::vector<double> table(m_ * k_);
  for (std::size_t b = 0; b < m_; ++b) {
    const double* qb = q.data() + b * sub;
    for (std::size_t c = 0; c < k_; ++c) {
      const double* cb = codebooks_.data() + (b * k_ + c) * sub;
      double s = 0.0;
      for (std::size_t j = 0; j < sub; ++j) s += qb[j] * cb[j];
      table[b * k_ + c] = s;
    }
  }
  return table;
}

double ProductQuantizer::score(std::span<const double> table,
                               std::span<const std::uint8_t> codes) const {
  double s = 0.0;
  for (std::size_t b = 0; b < m_; ++b) s += table[b * k_ + codes[b]];
  return s;
}

}  // namespace admatch::annindex
