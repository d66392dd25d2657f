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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace admatch::model {

// Categorical id spaces. Each space owns one embedding table that both
// towers read from.
enum class IdSpace : std::uint8_t { kItem = 0, kShop, kBrand, kTerm, kProfile };
inline constexpr std::size_t kNumSpaces = 5;
inline constexpr std::array<IdSpace, kNumSpaces> kAllSpaces = {
    IdSpace::kItem, IdSpace::kShop, IdSpace::kBrand, IdSpace::kTerm, IdSpace::kProfile};

std::string_view space_name(IdSpace space);
// Accepts "item_id" style names. Throws ConfigError on unknown names.
IdSpace parse_space(std::string_view name);

enum class EncoderVariant : std::uint8_t {
  kDnn,
  kGruRnn,
  kAttentionDnn,
  kAttentionGruRnn,
  kConcatenateDnn,
};
inline constexpr std::array<EncoderVariant, 5> kAllVariants = {
    EncoderVariant::kDnn, EncoderVariant::kGruRnn, EncoderVariant::kAttentionDnn,
    EncoderVariant::kAttentionGruRnn, EncoderVariant::kConcatenateDnn};

std::string_view variant_name(EncoderVariant variant);  // "ATTENTION_GRU_RNN"
EncoderVariant parse_variant(std::string_view name);
bool is_attentive(EncoderVariant variant);
bool is_recurrent(EncoderVariant variant);

enum class Activation : std::uint8_t { kRelu, kTanh };
std::string_view activation_name(Activation activation);
Activation parse_activation(std::string_view name);

struct EncoderConfig {
  EncoderVariant variant = EncoderVariant::kAttentionGruRnn;
  // Rows per embedding table, indexed by IdSpace; row 0 is the pad/OOV row.
  std::array<std::size_t, kNumSpaces> vocab_sizes = {1, 1, 1, 1, 1};
  std::size_t embedding_dim = 16;
  // Behavior window m.
  std::size_t window = 6;
  std::size_t gru_hidden = 32;
  std::size_t attention_hidden = 16;
  // Widths of the two shared tower layers; the last one is the output
  // dimension d of both towers.
  std::array<std::size_t, 2> tower_dims = {128, 128};
  std::size_t prerank_hidden = 64;
  bool share_tower = true;
  double gamma = 6.0;
  double alpha = 0.5;
  Activation activation = Activation::kTanh;

  std::size_t output_dim() const { return tower_dims[1]; }
  // item, shop, brand, title-term sum, source-query sum.
  std::size_t behavior_dim() const { return 5 * embedding_dim; }
  // item, shop, brand, title-term sum.
  std::size_t ad_dim() const { return 4 * embedding_dim; }
  // Width of the behavior encoding h.
  std::size_t encoding_dim() const;
  std::size_t vocab_size(IdSpace space) const {
    return vocab_sizes[static_cast<std::size_t>(space)];
  }

  // Throws ConfigError on gamma <= 0, alpha outside [0,1] or zero widths.
  void validate() const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);

}  // namespace admatch::model
