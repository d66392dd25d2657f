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

#include "admatch/model/model.hpp"

#include <algorithm>

#include "admatch/common/error.hpp"
#include "admatch/common/random.hpp"
#include "admatch/model/heads.hpp"

namespace admatch::model {
namespace {

constexpr double kInitScale = 0.05;

void check_range(IdSpace space, Id id, std::size_t vocab) {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
    throw VocabularyError("id " + std::to_string(id) + " out of range for " +
                          std::string(space_name(space)) + " (vocabulary size " +
                          std::to_string(vocab) + ")");
  }
}

void check_range(IdSpace space, const std::vector<Id>& ids, std::size_t vocab) {
  for (Id id : ids) check_range(space, id, vocab);
}

std::vector<double> row_vector(const Tensor& t, std::size_t r) {
  auto row = t.row(r);
  return {row.begin(), row.end()};
}

}  // namespace

Model::Model(EncoderConfig config) : config_(std::move(config)) { config_.validate(); }

std::string Model::embedding_name(IdSpace space) {
  return "embedding/" + std::string(space_name(space));
}

std::string Model::tower_prefix(Tower side) const {
  if (config_.share_tower) return "tower";
  return side == Tower::kQuery ? "qu_tower" : "ad_tower";
}

std::vector<std::string> Model::tower_param_names(Tower side) const {
  const std::string p = tower_prefix(side);
  return {p + "/layer1/W", p + "/layer1/b", p + "/layer2/W", p + "/layer2/b"};
}

std::vector<std::string> Model::prerank_param_names() const {
  return {"prerank/W", "prerank/b", "prerank/out/W", "prerank/out/b"};
}

std::vector<std::pair<std::string, numkit::Shape>> Model::param_shapes() const {
  const EncoderConfig& c = config_;
  const std::size_t e = c.embedding_dim;
  const std::size_t enc = c.encoding_dim();
  const std::size_t d = c.output_dim();
  std::vector<std::pair<std::string, numkit::Shape>> shapes;
  for (IdSpace s : kAllSpaces) shapes.emplace_back(embedding_name(s), numkit::Shape{c.vocab_size(s), e});

  auto dense = [&](const std::string& prefix, std::size_t in, std::size_t out) {
    shapes.emplace_back(prefix + "/W", numkit::Shape{in, out});
    shapes.emplace_back(prefix + "/b", numkit::Shape{1, out});
  };

  if (is_recurrent(c.variant)) {
    const std::size_t x = c.behavior_dim(), h = c.gru_hidden;
    for (const char* gate : {"z", "r", "n"}) {
      shapes.emplace_back(std::string("gru/W_") + gate, numkit::Shape{x, h});
      shapes.emplace_back(std::string("gru/U_") + gate, numkit::Shape{h, h});
      shapes.emplace_back(std::string("gru/b_") + gate, numkit::Shape{1, h});
    }
  }
  if (is_attentive(c.variant)) {
    const std::size_t state = c.variant == EncoderVariant::kAttentionGruRnn ? c.gru_hidden
                                                                            : c.behavior_dim();
    dense("attention/hidden", state + e, c.attention_hidden);
    shapes.emplace_back("attention/out/W", numkit::Shape{c.attention_hidden, 1});
  }
  if (c.variant == EncoderVariant::kConcatenateDnn) {
    dense("concat", c.window * c.behavior_dim(), c.gru_hidden);
  }

  dense("qu_proj", 2 * e + enc, enc);
  dense("ad_proj", c.ad_dim(), enc);

  auto tower_layers = [&](const std::string& prefix) {
    dense(prefix + "/layer1", enc, c.tower_dims[0]);
    dense(prefix + "/layer2", c.tower_dims[0], d);
  };
  if (c.share_tower) {
    tower_layers("tower");
  } else {
    tower_layers("qu_tower");
    tower_layers("ad_tower");
  }

  dense("prerank", 2 * d, c.prerank_hidden);
  dense("prerank/out", c.prerank_hidden, 1);
  return shapes;
}

ParamStore Model::init_params(std::uint64_t seed) const {
  auto shapes = param_shapes();
  std::sort(shapes.begin(), shapes.end());
  Rng rng(seed);
  ParamStore store;
  for (auto& [name, shape] : shapes) {
    Tensor t(shape);
    const bool is_embedding = name.starts_with("embedding/");
    const bool is_bias = name.ends_with("/b") || name.starts_with("gru/b_");
    // Glorot-uniform weights, zero biases.
    const double scale = is_embedding ? kInitScale
                         : is_bias    ? 0.0
                                      : std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
    for (double& v : t.data()) v = scale == 0.0 ? 0.0 : rng.uniform(-scale, scale);
    store.add(name, std::move(t), /*trainable=*/true, /*frozen_row0=*/is_embedding);
  }
  store.zero_pad_rows();
  return store;
}

Var Model::activate(Var x) const {
  return config_.activation == Activation::kRelu ? numkit::relu(x) : numkit::tanh(x);
}

Var Model::dense(Tape& tape, Var x, const std::string& prefix, bool activated) const {
  Var y = numkit::add_bias(numkit::matmul(x, tape.param(prefix + "/W")), tape.param(prefix + "/b"));
  return activated ? activate(y) : y;
}

Var Model::tower(Tape& tape, Var x, Tower side) const {
  const std::string p = tower_prefix(side);
  return dense(tape, dense(tape, x, p + "/layer1"), p + "/layer2");
}

Var Model::embed_ids(Tape& tape, IdSpace space, const std::vector<std::vector<Id>>& ids) const {
  const std::size_t vocab = config_.vocab_size(space);
  for (const auto& row : ids) check_range(space, row, vocab);
  return numkit::gather_sum(tape.param(embedding_name(space)), ids);
}

Var Model::embed_behavior_slot(Tape& tape, std::span<const QueryRequest* const> requests,
                               std::size_t slot) const {
  const std::size_t b = requests.size();
  std::vector<std::vector<Id>> item(b), shop(b), brand(b), title(b), query(b);
  for (std::size_t i = 0; i < b; ++i) {
    const auto& behaviors = requests[i]->behaviors;
    if (behaviors.size() != config_.window) {
      throw DimensionError("request holds " + std::to_string(behaviors.size()) +
                           " behavior slots, model window is " + std::to_string(config_.window));
    }
    const BehaviorItem& it = behaviors[slot];
    item[i] = {it.item_id};
    shop[i] = {it.shop_id};
    brand[i] = {it.brand_id};
    title[i] = it.title_term_ids;
    query[i] = it.query_term_ids;
  }
  const Var parts[] = {embed_ids(tape, IdSpace::kItem, item), embed_ids(tape, IdSpace::kShop, shop),
                       embed_ids(tape, IdSpace::kBrand, brand),
                       embed_ids(tape, IdSpace::kTerm, title),
                       embed_ids(tape, IdSpace::kTerm, query)};
  return numkit::concat_cols(parts);
}

Var Model::embed_ads(Tape& tape, std::span<const AdItem* const> ads) const {
  const std::size_t b = ads.size();
  std::vector<std::vector<Id>> item(b), shop(b), brand(b), title(b);
  for (std::size_t i = 0; i < b; ++i) {
    item[i] = {ads[i]->item_id};
    shop[i] = {ads[i]->shop_id};
    brand[i] = {ads[i]->brand_id};
    title[i] = ads[i]->title_term_ids;
  }
  const Var parts[] = {embed_ids(tape, IdSpace::kItem, item), embed_ids(tape, IdSpace::kShop, shop),
                       embed_ids(tape, IdSpace::kBrand, brand),
                       embed_ids(tape, IdSpace::kTerm, title)};
  return numkit::concat_cols(parts);
}

Var Model::query_embedding(Tape& tape, std::span<const QueryRequest* const> requests) const {
  std::vector<std::vector<Id>> ids;
  ids.reserve(requests.size());
  for (const QueryRequest* r : requests) ids.push_back(r->query_term_ids);
  return embed_ids(tape, IdSpace::kTerm, ids);
}

Var Model::profile_embedding(Tape& tape, std::span<const QueryRequest* const> requests) const {
  std::vector<std::vector<Id>> ids;
  ids.reserve(requests.size());
  for (const QueryRequest* r : requests) ids.push_back(r->profile_ids);
  return embed_ids(tape, IdSpace::kProfile, ids);
}

std::vector<Var> Model::gru_states(Tape& tape, std::span<const Var> inputs) const {
  using namespace numkit;
  const std::size_t batch = inputs.front().value().rows();
  Var h = tape.constant(Tensor::matrix(batch, config_.gru_hidden));
  auto gate = [&](Var x, Var hidden, const char* g) {
    return add_bias(add(matmul(x, tape.param(std::string("gru/W_") + g)),
                        matmul(hidden, tape.param(std::string("gru/U_") + g))),
                    tape.param(std::string("gru/b_") + g));
  };
  std::vector<Var> states;
  states.reserve(inputs.size());
  for (Var x : inputs) {
    Var z = sigmoid(gate(x, h, "z"));
    Var r = sigmoid(gate(x, h, "r"));
    Var n = tanh(gate(x, mul(r, h), "n"));
    // (1 - z) * n + z * h
    h = add(n, mul(z, sub(h, n)));
    states.push_back(h);
  }
  return states;
}

Var Model::attention_weights(Tape& tape, std::span<const Var> states, Var query) const {
  std::vector<Var> logits;
  logits.reserve(states.size());
  for (Var s : states) {
    const Var in[] = {s, query};
    Var hidden = dense(tape, numkit::concat_cols(in), "attention/hidden");
    logits.push_back(numkit::matmul(hidden, tape.param("attention/out/W")));
  }
  return numkit::softmax_rows(numkit::concat_cols(logits));
}

Var Model::encode_behaviors(Tape& tape, std::span<const QueryRequest* const> requests) const {
  std::vector<Var> slots;
  slots.reserve(config_.window);
  for (std::size_t t = 0; t < config_.window; ++t) {
    slots.push_back(embed_behavior_slot(tape, requests, t));
  }

  auto pooled = [&](std::span<const Var> states) {
    Var w = attention_weights(tape, states, query_embedding(tape, requests));
    std::vector<Var> terms;
    terms.reserve(states.size());
    for (std::size_t t = 0; t < states.size(); ++t) {
      terms.push_back(numkit::scale_rows(states[t], numkit::slice_cols(w, t, t + 1)));
    }
    return numkit::add_n(terms);
  };

  switch (config_.variant) {
    case EncoderVariant::kDnn:
      return numkit::affine(numkit::add_n(slots), 1.0 / static_cast<double>(slots.size()));
    case EncoderVariant::kGruRnn:
      return gru_states(tape, slots).back();
    case EncoderVariant::kAttentionDnn:
      return pooled(slots);
    case EncoderVariant::kAttentionGruRnn: {
      const auto states = gru_states(tape, slots);
      return pooled(states);
    }
    case EncoderVariant::kConcatenateDnn:
      return dense(tape, numkit::concat_cols(slots), "concat");
  }
  throw ConfigError("unhandled encoder variant");
}

Var Model::qu_forward(Tape& tape, std::span<const QueryRequest* const> requests) const {
  const Var parts[] = {query_embedding(tape, requests), profile_embedding(tape, requests),
                       encode_behaviors(tape, requests)};
  return tower(tape, dense(tape, numkit::concat_cols(parts), "qu_proj"), Tower::kQuery);
}

Var Model::ad_forward(Tape& tape, std::span<const AdItem* const> ads) const {
  return tower(tape, dense(tape, embed_ads(tape, ads), "ad_proj"), Tower::kAd);
}

Var Model::retrieval_logit(Var v_qu, Var v_a) const {
  return numkit::affine(numkit::cosine_rows(v_qu, v_a), config_.gamma);
}

Var Model::retrieval_prob(Var v_qu, Var v_a) const {
  return numkit::sigmoid(retrieval_logit(v_qu, v_a));
}

Var Model::prerank_logit(Tape& tape, Var v_qu, Var v_a) const {
  const Var in[] = {v_qu, v_a};
  Var hidden = dense(tape, numkit::concat_cols(in), "prerank");
  return dense(tape, hidden, "prerank/out", /*activated=*/false);
}

Var Model::prerank_prob(Tape& tape, Var v_qu, Var v_a) const {
  return numkit::sigmoid(prerank_logit(tape, v_qu, v_a));
}

Var Model::loss(Tape& tape, std::span<const ImpressionInstance* const> batch,
                LossKind kind) const {
  if (batch.empty()) throw DimensionError("loss over an empty batch");
  std::vector<const QueryRequest*> requests;
  std::vector<const AdItem*> ads;
  std::vector<double> labels;
  for (const ImpressionInstance* inst : batch) {
    requests.push_back(&inst->request);
    ads.push_back(&inst->ad);
    labels.push_back(inst->label);
  }
  Var v_qu = qu_forward(tape, requests);
  Var v_a = ad_forward(tape, ads);
  switch (kind) {
    case LossKind::kRetrieval:
      return numkit::bce_logits_mean(retrieval_logit(v_qu, v_a), labels);
    case LossKind::kPrerank:
      return numkit::bce_logits_mean(prerank_logit(tape, v_qu, v_a), labels);
    case LossKind::kJoint: {
      Var c_v = numkit::bce_logits_mean(retrieval_logit(v_qu, v_a), labels);
      Var c_r = numkit::bce_logits_mean(prerank_logit(tape, v_qu, v_a), labels);
      return numkit::add(numkit::affine(c_v, config_.alpha),
                         numkit::affine(c_r, 1.0 - config_.alpha));
    }
  }
  throw ConfigError("unhandled loss kind");
}

Tensor Model::embed_item(const ParamStore& params, const BehaviorItem& item) const {
  QueryRequest r;
  r.behaviors.assign(config_.window, BehaviorItem{});
  r.behaviors.back() = item;
  Tape tape(params);
  const QueryRequest* ptr[] = {&r};
  return Tensor::vector(row_vector(embed_behavior_slot(tape, ptr, config_.window - 1).value(), 0));
}

Tensor Model::embed_item(const ParamStore& params, const AdItem& item) const {
  Tape tape(params);
  const AdItem* ptr[] = {&item};
  return Tensor::vector(row_vector(embed_ads(tape, ptr).value(), 0));
}

Tensor Model::encode_behaviors(const ParamStore& params, const QueryRequest& request) const {
  Tape tape(params);
  const QueryRequest* ptr[] = {&request};
  return Tensor::vector(row_vector(encode_behaviors(tape, ptr).value(), 0));
}

std::vector<double> Model::attention_weights(const ParamStore& params,
                                             const QueryRequest& request) const {
  if (!is_attentive(config_.variant)) {
    throw ConfigError(std::string(variant_name(config_.variant)) + " has no attention weights");
  }
  Tape tape(params);
  const QueryRequest* ptr[] = {&request};
  std::vector<Var> slots;
  for (std::size_t t = 0; t < config_.window; ++t) slots.push_back(embed_behavior_slot(tape, ptr, t));
  const auto states =
      config_.variant == EncoderVariant::kAttentionGruRnn ? gru_states(tape, slots) : slots;
  return row_vector(attention_weights(tape, states, query_embedding(tape, ptr)).value(), 0);
}

std::vector<double> Model::qu_vector(const ParamStore& params, const QueryRequest& request) const {
  Tape tape(params);
  const QueryRequest* ptr[] = {&request};
  return row_vector(qu_forward(tape, ptr).value(), 0);
}

std::vector<double> Model::ad_vector(const ParamStore& params, const AdItem& ad) const {
  Tape tape(params);
  const AdItem* ptr[] = {&ad};
  return row_vector(ad_forward(tape, ptr).value(), 0);
}

std::vector<std::vector<double>> Model::ad_vectors(const ParamStore& params,
                                                   std::span<const AdItem> ads,
                                                   std::size_t batch_size) const {
  std::vector<std::vector<double>> out;
  out.reserve(ads.size());
  for (std::size_t start = 0; start < ads.size(); start += batch_size) {
    const std::size_t end = std::min(ads.size(), start + batch_size);
    std::vector<const AdItem*> ptrs;
    for (std::size_t i = start; i < end; ++i) ptrs.push_back(&ads[i]);
    Tape tape(params);
    const Tensor& v = ad_forward(tape, ptrs).value();
    for (std::size_t r = 0; r < v.rows(); ++r) out.push_back(row_vector(v, r));
  }
  return out;
}

double Model::prerank_prob(const ParamStore& params, std::span<const double> v_qu,
                           std::span<const double> v_a) const {
  const PrerankHead head = prerank_head(params);
  return prerank_prob_direct(head, v_qu, v_a);
}

Predictions Model::predict(const ParamStore& params, std::span<const ImpressionInstance> instances,
                           std::size_t batch_size) const {
  Predictions out;
  out.retrieval.reserve(instances.size());
  out.prerank.reserve(instances.size());
  for (std::size_t start = 0; start < instances.size(); start += batch_size) {
    const std::size_t end = std::min(instances.size(), start + batch_size);
    std::vector<const QueryRequest*> requests;
    std::vector<const AdItem*> ads;
    for (std::size_t i = start; i < end; ++i) {
      requests.push_back(&instances[i].request);
      ads.push_back(&instances[i].ad);
    }
    Tape tape(params);
    Var v_qu = qu_forward(tape, requests);
    Var v_a = ad_forward(tape, ads);
    const Tensor p = retrieval_prob(v_qu, v_a).value();
    const Tensor q = prerank_prob(tape, v_qu, v_a).value();
    out.retrieval.insert(out.retrieval.end(), p.data().begin(), p.data().end());
    out.prerank.insert(out.prerank.end(), q.data().begin(), q.data().end());
  }
  return out;
}

PrerankHead Model::prerank_head(const ParamStore& params) const {
  PrerankHead head;
  head.weight = params.at("prerank/W").value;
  const auto& b = params.at("prerank/b").value.data();
  head.bias.assign(b.begin(), b.end());
  const auto& w = params.at("prerank/out/W").value.data();
  head.out_weight.assign(w.begin(), w.end());
  head.out_bias = params.at("prerank/out/b").value[0];
  head.activation = config_.activation;
  return head;
}

void Model::check_ids(const QueryRequest& request) const {
  check_range(IdSpace::kTerm, request.query_term_ids, config_.vocab_size(IdSpace::kTerm));
  check_range(IdSpace::kProfile, request.profile_ids, config_.vocab_size(IdSpace::kProfile));
  for (const BehaviorItem& b : request.behaviors) {
    check_range(IdSpace::kItem, b.item_id, config_.vocab_size(IdSpace::kItem));
    check_range(IdSpace::kShop, b.shop_id, config_.vocab_size(IdSpace::kShop));
    check_range(IdSpace::kBrand, b.brand_id, config_.vocab_size(IdSpace::kBrand));
    check_range(IdSpace::kTerm, b.title_term_ids, config_.vocab_size(IdSpace::kTerm));
    check_range(IdSpace::kTerm, b.query_term_ids, config_.vocab_size(IdSpace::kTerm));
  }
}

void Model::check_ids(const AdItem& ad) const {
  check_range(IdSpace::kItem, ad.item_id, config_.vocab_size(IdSpace::kItem));
  check_range(IdSpace::kShop, ad.shop_id, config_.vocab_size(IdSpace::kShop));
  check_range(IdSpace::kBrand, ad.brand_id, config_.vocab_size(IdSpace::kBrand));
  check_range(IdSpace::kTerm, ad.title_term_ids, config_.vocab_size(IdSpace::kTerm));
}

}  // namespace admatch::model
