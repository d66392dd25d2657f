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
#include <span>
#include <vector>

namespace admatch::annindex {

struct PqConfig {
  std::size_t subquantizers = 16;  // M
  std::size_t centroids = 256;     // k, at most 256
  std::size_t iterations = 25;     // Lloyd iteration cap
  std::uint64_t seed = 1;
};

// Product quantizer over d-dimensional vectors: d splits into M contiguous
// blocks, each quantized by its own k-centroid codebook.
class ProductQuantizer {
 public:
  ProductQuantizer() = default;

  // `data` holds n row-major vectors of `dim` values. Per block: k-means++
  // seeding then Lloyd iterations until assignments settle or the cap is hit;
  // a centroid that loses all its points keeps its position. Throws
  // QuantizerTrainingError when n < k and ConfigError on bad shapes.
  static ProductQuantizer train(std::span<const double> data, std::size_t dim,
                                const PqConfig& config);

  // Rebuilds a quantizer from stored parts (file loading).
  ProductQuantizer(std::size_t dim, std::size_t m, std::size_t k, std::vector<double> codebooks,
                   std::vector<double> cell_diameters);

  std::size_t dim() const { return dim_; }
  std::size_t subquantizers() const { return m_; }
  std::size_t centroids() const { return k_; }
  std::size_t sub_dim() const { return dim_ / m_; }

  // M x k x (d/M), row-major.
  std::span<const double> codebooks() const { return codebooks_; }
  std::span<const double> centroid(std::size_t block, std::size_t c) const;

  // Nearest centroid per block (squared L2, lowest index on ties).
  std::vector<std::uint8_t> encode(std::span<const double> v) const;
  void encode_into(std::span<const double> v, std::span<std::uint8_t> out) const;
  std::vector<double> decode(std::span<const std::uint8_t> codes) const;

  // M x k table of block inner products <q_block, centroid>.
  std::vector<double> inner_product_table(std::span<const double> q) const;
  // Sum over blocks of table lookups, in block order.
  double score(std::span<const double> table, std::span<const std::uint8_t> codes) const;

  // Total squared quantization error of the training data after each
  // assignment pass, summed over blocks (every block's trace is padded with
  // its last value to the longest run).
  const std::vector<double>& error_trace() const { return error_trace_; }
  // Per block, the largest distance between two training points sharing a
  // cell.
  const std::vector<double>& cell_diameters() const { return cell_diameters_; }

 private:
  std::size_t dim_ = 0;
  std::size_t m_ = 0;
  std::size_t k_ = 0;
  std::vector<double> codebooks_;
  std::vector<double> error_trace_;
  std::vector<double> cell_diameters_;
};

}  // namespace admatch::annindex
