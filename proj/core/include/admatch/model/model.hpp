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
#include <string>
#include <vector>

#include "admatch/model/config.hpp"
#include "admatch/model/features.hpp"
#include "admatch/numkit/ops.hpp"
#include "admatch/numkit/param_store.hpp"
#include "admatch/numkit/tape.hpp"

namespace admatch::model {

using numkit::ParamStore;
using numkit::Tape;
using numkit::Tensor;
using numkit::Var;

enum class LossKind : std::uint8_t { kRetrieval, kPrerank, kJoint };
enum class Tower : std::uint8_t { kQuery, kAd };

struct Predictions {
  std::vector<double> retrieval;  // P
  std::vector<double> prerank;    // P'
};

// Parameters of the pre-rank head in serving-friendly form. `weight` is
// [2d x r]: rows [0, d) multiply V_qu, rows [d, 2d) multiply V_a.
struct PrerankHead {
  Tensor weight;
  std::vector<double> bias;
  std::vector<double> out_weight;
  double out_bias = 0.0;
  Activation activation = Activation::kTanh;
};

// Two-tower matching network. Qu-Net encodes the query request (query terms,
// profile, behavior sequence); Ad-Net encodes the ad. Both towers read the
// same embedding tables and, with share_tower, the same two tower layers.
// Task heads: scaled-cosine retrieval probability and an MLP pre-rank
// probability over concat(V_qu, V_a).
//
// Graph builders take batches and record on a caller-owned Tape; the
// convenience overloads run a private tape per call.
class Model {
 public:
  explicit Model(EncoderConfig config);

  const EncoderConfig& config() const { return config_; }

  // Embeddings uniform in [-0.05, 0.05] with pad rows zeroed, weight
  // matrices Glorot-uniform, biases zero.
  ParamStore init_params(std::uint64_t seed) const;

  static std::string embedding_name(IdSpace space);
  // Names of the two tower layers used by `side`; identical for both sides
  // when share_tower is on.
  std::vector<std::string> tower_param_names(Tower side) const;
  // Parameters only the pre-rank head reads.
  std::vector<std::string> prerank_param_names() const;

  // --- batched graph builders -------------------------------------------
  Var embed_behavior_slot(Tape& tape, std::span<const QueryRequest* const> requests,
                          std::size_t slot) const;
  Var embed_ads(Tape& tape, std::span<const AdItem* const> ads) const;
  Var query_embedding(Tape& tape, std::span<const QueryRequest* const> requests) const;
  Var profile_embedding(Tape& tape, std::span<const QueryRequest* const> requests) const;

  // GRU hidden states h_1..h_m over the behavior slots.
  std::vector<Var> gru_states(Tape& tape, std::span<const Var> inputs) const;
  // Softmax over a two-layer net of concat(state_t, query), as [B x m].
  Var attention_weights(Tape& tape, std::span<const Var> states, Var query) const;
  Var encode_behaviors(Tape& tape, std::span<const QueryRequest* const> requests) const;

  Var qu_forward(Tape& tape, std::span<const QueryRequest* const> requests) const;
  Var ad_forward(Tape& tape, std::span<const AdItem* const> ads) const;

  // sigmoid(gamma * cosine(V_qu, V_a)) per row, [B x 1]; the logit form
  // stops before the sigmoid.
  Var retrieval_logit(Var v_qu, Var v_a) const;
  Var retrieval_prob(Var v_qu, Var v_a) const;
  // sigmoid(logit(f(concat(V_qu, V_a) W + b))) per row, [B x 1].
  Var prerank_logit(Tape& tape, Var v_qu, Var v_a) const;
  Var prerank_prob(Tape& tape, Var v_qu, Var v_a) const;

  // Mean cross-entropy loss of the requested kind over the batch; kJoint is
  // alpha * C_v + (1 - alpha) * C_r on one shared tower pass.
  Var loss(Tape& tape, std::span<const ImpressionInstance* const> batch, LossKind kind) const;

  // --- single-item conveniences (rank-1 results) -------------------------
  Tensor embed_item(const ParamStore& params, const BehaviorItem& item) const;
  Tensor embed_item(const ParamStore& params, const AdItem& item) const;
  Tensor encode_behaviors(const ParamStore& params, const QueryRequest& request) const;
  std::vector<double> attention_weights(const ParamStore& params,
                                        const QueryRequest& request) const;
  std::vector<double> qu_vector(const ParamStore& params, const QueryRequest& request) const;
  std::vector<double> ad_vector(const ParamStore& params, const AdItem& ad) const;
  std::vector<std::vector<double>> ad_vectors(const ParamStore& params,
                                              std::span<const AdItem> ads,
                                              std::size_t batch_size = 256) const;
  double prerank_prob(const ParamStore& params, std::span<const double> v_qu,
                      std::span<const double> v_a) const;

  Predictions predict(const ParamStore& params, std::span<const ImpressionInstance> instances,
                      std::size_t batch_size = 256) const;

  PrerankHead prerank_head(const ParamStore& params) const;

  // Throws VocabularyError naming the space if any id is out of range.
  void check_ids(const QueryRequest& request) const;
  void check_ids(const AdItem& ad) const;

 private:
  std::string tower_prefix(Tower side) const;
  std::vector<std::pair<std::string, numkit::Shape>> param_shapes() const;
  Var activate(Var x) const;
  Var dense(Tape& tape, Var x, const std::string& prefix, bool activated = true) const;
  Var tower(Tape& tape, Var x, Tower side) const;
  Var embed_ids(Tape& tape, IdSpace space, const std::vector<std::vector<Id>>& ids) const;

  EncoderConfig config_;
};

}  // namespace admatch::model
