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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace admatch::numkit {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

// Dense row-major array of doubles. Rank-2 is the working shape for all
// model math; vectors are stored as [1 x n] or [n] depending on the caller.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  // Builds a [rows x cols] tensor from nested initializer lists.
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  // Builds a rank-1 tensor.
  static Tensor vector(std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Rank-2 accessors. A rank-1 tensor behaves as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return std::span(data_).subspan(r * cols(), cols()); }
  std::span<const double> row(std::size_t r) const {
    return std::span(data_).subspan(r * cols(), cols());
  }
  std::vector<double>& storage() { return data_; }

  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Plain (non-recording) math used by serving code and test oracles.

// [m x k] * [k x n]. Throws DimensionError naming both shapes.
Tensor matmul(const Tensor& a, const Tensor& b);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

// Throws DegenerateVectorError when either input has zero norm.
double cosine(std::span<const double> u, std::span<const double> v);

// Returns v / ||v||. Throws DegenerateVectorError on a zero vector.
std::vector<double> normalized(std::span<const double> v);

double sigmoid(double x);
double relu(double x);

// Numerically stable row-wise softmax of a rank-2 tensor.
Tensor softmax_rows(const Tensor& logits);

}  // namespace admatch::numkit
