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

#include <cstdint>
#include <span>
#include <vector>

#include "admatch/numkit/tape.hpp"

// Differentiable operations. Every function records its result on the tape
// of its first operand and registers the matching backward contribution.
// Operands are rank-2 [rows x cols] unless noted.
namespace admatch::numkit {

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
// a [m x n] + bias [1 x n], broadcast over rows.
Var add_bias(Var a, Var bias);
// scale * a + shift, elementwise.
Var affine(Var a, double scale, double shift = 0.0);
Var add_n(std::span<const Var> terms);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var softmax_rows(Var a);

Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
// Multiplies row i of a [m x n] by w(i, 0), w is [m x 1].
Var scale_rows(Var a, Var w);
// Sum of every element, as [1 x 1].
Var sum_all(Var a);

// Row i of the result is the sum of table rows ids[i]; an empty list yields
// a zero row. Ids must be < table rows.
Var gather_sum(Var table, const std::vector<std::vector<std::int32_t>>& ids);

// Row-wise cosine similarity of two [m x d] inputs, as [m x 1]. Throws
// DegenerateVectorError if any row of either input has zero norm.
Var cosine_rows(Var u, Var v);

// Mean binary cross-entropy of probabilities p [m x 1] against labels in
// {0,1}, with p clipped to [kProbClip, 1 - kProbClip]. Returns [1 x 1].
inline constexpr double kProbClip = 1e-12;
Var bce_mean(Var p, std::span<const double> labels);
// The same loss taken on logits z with p = sigmoid(z). Evaluated through
// softplus, so confident predictions keep full precision; z is clipped to
// the logits of the probability clip range.
inline constexpr double kLogitClip = 27.631021115928547;  // logit(1 - 1e-12)
Var bce_logits_mean(Var z, std::span<const double> labels);

}  // namespace admatch::numkit
