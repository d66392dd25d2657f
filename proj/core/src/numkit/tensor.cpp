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

#include "admatch/numkit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "admatch/common/error.hpp"

namespace admatch::numkit {

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

std::size_t element_count(const Shape& shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_string(shape));
  }
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw DimensionError("shape " + shape_string(shape_) + " does not match " +
                         std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged rows in Tensor::from_rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(values));
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape_.size() == 1) return 1;
  if (shape_.size() != 2) throw DimensionError("expected rank-2 tensor, got " + shape_string(shape_));
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() == 1) return shape_[0];
  if (shape_.size() != 2) throw DimensionError("expected rank-2 tensor, got " + shape_string(shape_));
  return shape_[1];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul shape mismatch: " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = Tensor::matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* o = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      const double* brow = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += av * brow[j];
    }
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot of lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double cosine(std::span<const double> u, std::span<const double> v) {
  const double nu = l2_norm(u), nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw DegenerateVectorError("cosine of a zero-norm vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

std::vector<double> normalized(std::span<const double> v) {
  const double n = l2_norm(v);
  if (n == 0.0 || !std::isfinite(n)) throw DegenerateVectorError("cannot normalize a zero-norm vector");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

Tensor softmax_rows(const Tensor& logits) {
  Tensor out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return out;
}

}  // namespace admatch::numkit
