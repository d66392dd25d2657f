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

#include <span>
#include <vector>

#include "admatch/model/config.hpp"
#include "admatch/numkit/tensor.hpp"

// Plain scalar forms of the two task heads, used at serving time and as
// test oracles for the recorded graph.
namespace admatch::model {

struct PrerankHead;

// sigmoid(gamma * cosine). Throws DegenerateVectorError on zero vectors.
double retrieval_prob(std::span<const double> v_qu, std::span<const double> v_a, double gamma);
double retrieval_prob_from_cosine(double cosine, double gamma);

// Mean binary cross-entropy with probabilities clipped to [1e-12, 1-1e-12].
double bce_loss(std::span<const double> probs, std::span<const double> labels);

// The pre-rank first layer split into a per-request part and a per-ad part:
//   query_part = (V_qu, 0) W + b     (bias folded into the query side)
//   ad_part    = (0, V_a) W
//   recombined = query_part + ad_part == (V_qu, V_a) W + b
struct SplitParts {
  std::vector<double> query_part;
  std::vector<double> ad_part;
  std::vector<double> recombined;
};

std::vector<double> query_part(std::span<const double> v_qu, const numkit::Tensor& weight,
                               std::span<const double> bias);
std::vector<double> ad_part(std::span<const double> v_a, const numkit::Tensor& weight);
SplitParts prerank_split(std::span<const double> v_qu, std::span<const double> v_a,
                         const numkit::Tensor& weight, std::span<const double> bias);
// (V_qu, V_a) W + b computed in one product.
std::vector<double> prerank_preactivation(std::span<const double> v_qu,
                                          std::span<const double> v_a,
                                          const numkit::Tensor& weight,
                                          std::span<const double> bias);

// P' from a first-layer pre-activation.
double prerank_prob_from_preactivation(const PrerankHead& head,
                                       std::span<const double> preactivation);
double prerank_prob_direct(const PrerankHead& head, std::span<const double> v_qu,
                           std::span<const double> v_a);
double prerank_prob_split(const PrerankHead& head, std::span<const double> query_part,
                          std::span<const double> ad_part);

}  // namespace admatch::model
