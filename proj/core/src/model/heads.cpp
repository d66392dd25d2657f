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

#include "admatch/model/heads.hpp"

#include <algorithm>
#include <cmath>

#include "admatch/common/error.hpp"
#include "admatch/model/model.hpp"
#include "admatch/numkit/ops.hpp"

namespace admatch::model {
namespace {

void require_rows(const numkit::Tensor& weight, std::size_t rows) {
  if (weight.rank() != 2 || weight.rows() != rows) {
    throw DimensionError("pre-rank weight " + numkit::shape_string(weight.shape()) +
                         " needs " + std::to_string(rows) + " rows");
  }
}

// Accumulates v * weight[row_offset : row_offset + |v|, :] into out.
void accumulate_rows(std::span<const double> v, const numkit::Tensor& weight,
                     std::size_t row_offset, std::vector<double>& out) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    auto w = weight.row(row_offset + i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += x * w[j];
  }
}

}  // namespace

double retrieval_prob_from_cosine(double cosine, double gamma) {
  return numkit::sigmoid(gamma * cosine);
}

double retrieval_prob(std::span<const double> v_qu, std::span<const double> v_a, double gamma) {
  return retrieval_prob_from_cosine(numkit::cosine(v_qu, v_a), gamma);
}

double bce_loss(std::span<const double> probs, std::span<const double> labels) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw DimensionError("bce_loss needs equal, nonempty prediction and label lists");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], numkit::kProbClip, 1.0 - numkit::kProbClip);
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return total / static_cast<double>(probs.size());
}

std::vector<double> query_part(std::span<const double> v_qu, const numkit::Tensor& weight,
                               std::span<const double> bias) {
  require_rows(weight, 2 * v_qu.size());
  std::vector<double> out(bias.begin(), bias.end());
  if (out.size() != weight.cols()) throw DimensionError("pre-rank bias width mismatch");
  accumulate_rows(v_qu, weight, 0, out);
  return out;
}

std::vector<double> ad_part(std::span<const double> v_a, const numkit::Tensor& weight) {
  require_rows(weight, 2 * v_a.size());
  std::vector<double> out(weight.cols(), 0.0);
  accumulate_rows(v_a, weight, v_a.size(), out);
  return out;
}

SplitParts prerank_split(std::span<const double> v_qu, std::span<const double> v_a,
                         const numkit::Tensor& weight, std::span<const double> bias) {
  if (v_qu.size() != v_a.size()) throw DimensionError("V_qu and V_a widths differ");
  SplitParts parts;
  parts.query_part = query_part(v_qu, weight, bias);
  parts.ad_part = ad_part(v_a, weight);
  parts.recombined = parts.query_part;
  for (std::size_t j = 0; j < parts.recombined.size(); ++j) {
    parts.recombined[j] += parts.ad_part[j];
  }
  return parts;
}

std::vector<double> prerank_preactivation(std::span<const double> v_qu,
                                          std::span<const double> v_a,
                                          const numkit::Tensor& weight,
                                          std::span<const double> bias) {
  if (v_qu.size() != v_a.size()) throw DimensionError("V_qu and V_a widths differ");
  require_rows(weight, 2 * v_qu.size());
  std::vector<double> input(v_qu.begin(), v_qu.end());
  input.insert(input.end(), v_a.begin(), v_a.end());
  std::vector<double> out(weight.cols(), 0.0);
  accumulate_rows(input, weight, 0, out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += bias[j];
  return out;
}

double prerank_prob_from_preactivation(const PrerankHead& head,
                                       std::span<const double> preactivation) {
  double logit = head.out_bias;
  for (std::size_t j = 0; j < preactivation.size(); ++j) {
    const double x = preactivation[j];
    const double h = head.activation == Activation::kRelu ? numkit::relu(x) : std::tanh(x);
    logit += h * head.out_weight[j];
  }
  return numkit::sigmoid(logit);
}

double prerank_prob_direct(const PrerankHead& head, std::span<const double> v_qu,
                           std::span<const double> v_a) {
  return prerank_prob_from_preactivation(
      head, prerank_preactivation(v_qu, v_a, head.weight, head.bias));
}

double prerank_prob_split(const PrerankHead& head, std::span<const double> query_part,
                          std::span<const double> ad_part) {
  if (query_part.size() != ad_part.size()) throw DimensionError("split part widths differ");
  std::vector<double> pre(query_part.begin(), query_part.end());
  for (std::size_t j = 0; j < pre.size(); ++j) pre[j] += ad_part[j];
  return prerank_prob_from_preactivation(head, pre);
}

}  // namespace admatch::model
