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

#include "admatch/model/config.hpp"

#include "admatch/common/error.hpp"

namespace admatch::model {

std::string_view space_name(IdSpace space) {
  switch (space) {
    case IdSpace::kItem: return "item_id";
    case IdSpace::kShop: return "shop_id";
    case IdSpace::kBrand: return "brand_id";
    case IdSpace::kTerm: return "term_id";
    case IdSpace::kProfile: return "profile_id";
  }
  return "unknown";
}

IdSpace parse_space(std::string_view name) {
  for (IdSpace s : kAllSpaces) {
    if (space_name(s) == name) return s;
  }
  throw ConfigError("unknown id space: " + std::string(name));
}

std::string_view variant_name(EncoderVariant variant) {
  switch (variant) {
    case EncoderVariant::kDnn: return "DNN";
    case EncoderVariant::kGruRnn: return "GRU_RNN";
    case EncoderVariant::kAttentionDnn: return "ATTENTION_DNN";
    case EncoderVariant::kAttentionGruRnn: return "ATTENTION_GRU_RNN";
    case EncoderVariant::kConcatenateDnn: return "CONCATENATE_DNN";
  }
  return "unknown";
}

EncoderVariant parse_variant(std::string_view name) {
  for (EncoderVariant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown encoder variant: " + std::string(name));
}

bool is_attentive(EncoderVariant variant) {
  return variant == EncoderVariant::kAttentionDnn || variant == EncoderVariant::kAttentionGruRnn;
}

bool is_recurrent(EncoderVariant variant) {
  return variant == EncoderVariant::kGruRnn || variant == EncoderVariant::kAttentionGruRnn;
}

std::string_view activation_name(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation: " + std::string(name));
}

std::size_t EncoderConfig::encoding_dim() const {
  switch (variant) {
    case EncoderVariant::kDnn:
    case EncoderVariant::kAttentionDnn:
      return behavior_dim();
    case EncoderVariant::kGruRnn:
    case EncoderVariant::kAttentionGruRnn:
    case EncoderVariant::kConcatenateDnn:
      return gru_hidden;
  }
  return gru_hidden;
}

void EncoderConfig::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (embedding_dim == 0 || window == 0 || gru_hidden == 0 || attention_hidden == 0 ||
      tower_dims[0] == 0 || tower_dims[1] == 0 || prerank_hidden == 0) {
    throw ConfigError("layer widths and window must be positive");
  }
  for (IdSpace s : kAllSpaces) {
    if (vocab_size(s) == 0) {
      throw ConfigError("vocabulary of " + std::string(space_name(s)) + " must include the pad row");
    }
  }
}

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  nlohmann::json vocab = nlohmann::json::object();
  for (IdSpace s : kAllSpaces) vocab[std::string(space_name(s))] = c.vocab_size(s);
  j = nlohmann::json{
      {"variant", variant_name(c.variant)},
      {"vocab_sizes", vocab},
      {"embedding_dim", c.embedding_dim},
      {"window", c.window},
      {"gru_hidden", c.gru_hidden},
      {"attention_hidden", c.attention_hidden},
      {"tower_dims", c.tower_dims},
      {"prerank_hidden", c.prerank_hidden},
      {"share_tower", c.share_tower},
      {"gamma", c.gamma},
      {"alpha", c.alpha},
      {"activation", activation_name(c.activation)},
  };
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  c.variant = parse_variant(j.at("variant").get<std::string>());
  for (IdSpace s : kAllSpaces) {
    c.vocab_sizes[static_cast<std::size_t>(s)] =
        j.at("vocab_sizes").at(std::string(space_name(s))).get<std::size_t>();
  }
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.window = j.at("window").get<std::size_t>();
  c.gru_hidden = j.at("gru_hidden").get<std::size_t>();
  c.attention_hidden = j.at("attention_hidden").get<std::size_t>();
  c.tower_dims = j.at("tower_dims").get<std::array<std::size_t, 2>>();
  c.prerank_hidden = j.at("prerank_hidden").get<std::size_t>();
  c.share_tower = j.at("share_tower").get<bool>();
  c.gamma = j.at("gamma").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
}

}  // namespace admatch::model
