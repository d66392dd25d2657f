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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "admatch/dataio/log_record.hpp"
#include "admatch/model/config.hpp"
#include "admatch/model/features.hpp"

namespace admatch::dataio {

using model::Id;
using model::IdSpace;

// Token -> id maps, one per id space. Id 0 is reserved for pad and
// out-of-vocabulary tokens; kept tokens get dense ids 1..n in frequency
// order (ties broken lexicographically).
class Vocabulary {
 public:
  Vocabulary();

  // Appends `token` to `space` if absent and returns its id.
  Id add(IdSpace space, const std::string& token);
  // 0 for unknown tokens.
  Id lookup(IdSpace space, std::string_view token) const;
  std::vector<Id> lookup(IdSpace space, const std::vector<std::string>& tokens) const;
  // Includes the pad row.
  std::size_t size(IdSpace space) const;
  const std::string& token(IdSpace space, Id id) const;

  std::array<std::size_t, model::kNumSpaces> sizes() const;

  // TSV rows "token<TAB>space<TAB>id", pad rows omitted, grouped by space in
  // IdSpace order then by id.
  void save_tsv(const std::filesystem::path& path) const;
  static Vocabulary load_tsv(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  struct Space {
    std::vector<std::string> tokens;  // index = id; tokens[0] is the pad marker
    std::unordered_map<std::string, Id> ids;
    friend bool operator==(const Space&, const Space&) = default;
  };
  std::array<Space, model::kNumSpaces> spaces_;
};

inline constexpr std::size_t kUnlimitedTopK = static_cast<std::size_t>(-1);

// Per-space cap on kept tokens.
struct TopK {
  std::array<std::size_t, model::kNumSpaces> per_space;

  static TopK uniform(std::size_t k) {
    TopK t;
    t.per_space.fill(k);
    return t;
  }
  std::size_t operator[](IdSpace s) const { return per_space[static_cast<std::size_t>(s)]; }
};

// Token frequencies per space over everything a model reads from the logs:
// behavior and ad item/shop/brand ids, title terms, query terms (current and
// source queries) and profile ids.
std::array<std::unordered_map<std::string, std::size_t>, model::kNumSpaces> count_tokens(
    const std::vector<LogRecord>& logs);

// Throws EmptyCorpusError when `logs` is empty, ConfigError on top_k == 0.
Vocabulary build_vocab(const std::vector<LogRecord>& logs, const TopK& top_k);

}  // namespace admatch::dataio
