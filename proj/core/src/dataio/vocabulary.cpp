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

#include "admatch/dataio/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "admatch/common/error.hpp"

namespace admatch::dataio {
namespace {

constexpr std::string_view kPadToken = "<pad>";

std::size_t idx(IdSpace s) { return static_cast<std::size_t>(s); }

}  // namespace

Vocabulary::Vocabulary() {
  for (Space& s : spaces_) s.tokens.emplace_back(kPadToken);
}

Id Vocabulary::add(IdSpace space, const std::string& token) {
  Space& s = spaces_[idx(space)];
  if (auto it = s.ids.find(token); it != s.ids.end()) return it->second;
  const Id id = static_cast<Id>(s.tokens.size());
  s.tokens.push_back(token);
  s.ids.emplace(token, id);
  return id;
}

Id Vocabulary::lookup(IdSpace space, std::string_view token) const {
  const Space& s = spaces_[idx(space)];
  auto it = s.ids.find(std::string(token));
  return it == s.ids.end() ? 0 : it->second;
}

std::vector<Id> Vocabulary::lookup(IdSpace space, const std::vector<std::string>& tokens) const {
  std::vector<Id> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lookup(space, t));
  return out;
}

std::size_t Vocabulary::size(IdSpace space) const { return spaces_[idx(space)].tokens.size(); }

const std::string& Vocabulary::token(IdSpace space, Id id) const {
  const Space& s = spaces_[idx(space)];
  if (id < 0 || static_cast<std::size_t>(id) >= s.tokens.size()) {
    throw VocabularyError("id " + std::to_string(id) + " out of range for " +
                          std::string(model::space_name(space)));
  }
  return s.tokens[static_cast<std::size_t>(id)];
}

std::array<std::size_t, model::kNumSpaces> Vocabulary::sizes() const {
  std::array<std::size_t, model::kNumSpaces> out{};
  for (IdSpace s : model::kAllSpaces) out[idx(s)] = size(s);
  return out;
}

void Vocabulary::save_tsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  for (IdSpace space : model::kAllSpaces) {
    const Space& s = spaces_[idx(space)];
    for (std::size_t id = 1; id < s.tokens.size(); ++id) {
      out << s.tokens[id] << '\t' << model::space_name(space) << '\t' << id << '\n';
    }
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

Vocabulary Vocabulary::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  Vocabulary v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": want 3 tab-separated fields");
    }
    const std::string token = line.substr(0, t1);
    const IdSpace space = model::parse_space(line.substr(t1 + 1, t2 - t1 - 1));
    const long id = std::stol(line.substr(t2 + 1));
    if (static_cast<std::size_t>(id) != v.size(space) || v.lookup(space, token) != 0) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": ids must be dense, ascending and unique per space");
    }
    v.add(space, token);
  }
  return v;
}

std::array<std::unordered_map<std::string, std::size_t>, model::kNumSpaces> count_tokens(
    const std::vector<LogRecord>& logs) {
  std::array<std::unordered_map<std::string, std::size_t>, model::kNumSpaces> counts;
  auto bump = [&](IdSpace s, const std::string& token) {
    if (!token.empty()) ++counts[idx(s)][token];
  };
  auto item = [&](const ItemDescriptor& d) {
    bump(IdSpace::kItem, d.item_id);
    bump(IdSpace::kShop, d.shop_id);
    bump(IdSpace::kBrand, d.brand_id);
    for (const auto& t : d.title_terms) bump(IdSpace::kTerm, t);
  };
  for (const LogRecord& r : logs) {
    for (const auto& t : r.query_terms) bump(IdSpace::kTerm, t);
    for (const auto& p : r.profile) bump(IdSpace::kProfile, p);
    for (const BehaviorEvent& b : r.behavior_items) {
      item(b.item);
      for (const auto& t : b.source_query) bump(IdSpace::kTerm, t);
    }
    item(r.ad.item);
  }
  return counts;
}

Vocabulary build_vocab(const std::vector<LogRecord>& logs, const TopK& top_k) {
  if (logs.empty()) throw EmptyCorpusError("cannot build a vocabulary from an empty corpus");
  for (IdSpace s : model::kAllSpaces) {
    if (top_k[s] == 0) throw ConfigError("top_k must be at least 1");
  }
  const auto counts = count_tokens(logs);
  Vocabulary vocab;
  for (IdSpace space : model::kAllSpaces) {
    std::vector<std::pair<std::string, std::size_t>> ranked(counts[idx(space)].begin(),
                                                            counts[idx(space)].end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    const std::size_t keep = std::min(ranked.size(), top_k[space]);
    for (std::size_t i = 0; i < keep; ++i) vocab.add(space, ranked[i].first);
  }
  return vocab;
}

}  // namespace admatch::dataio
