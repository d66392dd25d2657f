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

#include "admatch/pipeline/matching_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/dataio/instances.hpp"
#include "admatch/model/heads.hpp"

namespace admatch::pipeline {

std::vector<std::string> Candidate::path_names() const {
  std::vector<std::string> out;
  if (has(Path::kKeyword)) out.emplace_back("KEYWORD");
  if (has(Path::kVector)) out.emplace_back("VECTOR");
  return out;
}

AdCatalog make_catalog(std::span<const dataio::AdDescriptor> ads, const dataio::Vocabulary& vocab) {
  AdCatalog catalog;
  for (const auto& ad : ads) {
    catalog[ad.ad_id] = AdInfo{dataio::to_ad_item(ad.item, vocab), ad.cost, ad.item.category};
  }
  return catalog;
}

MatchingEngine::MatchingEngine(const model::Model& model, const numkit::ParamStore& params,
                               const BidwordIndex& bidwords, const annindex::AnnIndex* ann,
                               const AdPartsTable* ad_parts, const AdCatalog& catalog,
                               EngineConfig config)
    : model_(model), params_(params), bidwords_(bidwords), ann_(ann), ad_parts_(ad_parts),
      catalog_(catalog), config_(config), head_(model.prerank_head(params)) {
  if (config_.vector_path) {
    if (ann_ == nullptr) throw ConfigError("vector path enabled without an ANN index");
    if (ann_->dim() != model.config().output_dim()) {
      throw DimensionError(fmt::format("index dimension {} but model output dimension {}",
                                       ann_->dim(), model.config().output_dim()));
    }
  }
  if (config_.top_n == 0 || config_.k_vector == 0 || config_.overfetch == 0) {
    throw ConfigError("top_n, k_vector and overfetch must be positive");
  }
  if (ad_parts_ && ad_parts_->width() != head_.bias.size()) {
    throw DimensionError("ad-parts table width does not match the pre-rank layer");
  }
}

const std::vector<double>& MatchingEngine::raw_ad_vector(AdId id) const {
  auto it = raw_vectors_.find(id);
  if (it == raw_vectors_.end()) {
    it = raw_vectors_.emplace(id, model_.ad_vector(params_, catalog_.at(id).item)).first;
  }
  return it->second;
}

std::vector<Candidate> MatchingEngine::retrieve_with(std::span<const double> v_qu,
                                                     std::string_view raw_query) const {
  std::map<AdId, Candidate> merged;
  if (config_.keyword_path) {
    for (AdId id : bidwords_.lookup(raw_query)) {
      auto& c = merged[id];
      c.ad_id = id;
      c.paths |= static_cast<std::uint8_t>(Path::kKeyword);
    }
  }
  if (config_.vector_path && !v_qu.empty()) {
    const double n = numkit::l2_norm(v_qu);
    if (n > 0.0) {
      std::vector<double> q(v_qu.begin(), v_qu.end());
      for (double& x : q) x /= n;
      for (const auto& hit : ann_->pq_search(q, config_.k_vector, config_.overfetch)) {
        auto& c = merged[hit.ad_id];
        c.ad_id = hit.ad_id;
        c.paths |= static_cast<std::uint8_t>(Path::kVector);
        c.retrieval_score = hit.score;
      }
    } else {
      log::warn("zero-norm query vector; vector path skipped");
    }
  }
  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (auto& [id, c] : merged) {
    auto info = catalog_.find(id);
    if (info == catalog_.end()) continue;
    c.cost = info->second.cost;
    out.push_back(c);
  }
  return out;
}

std::vector<Candidate> MatchingEngine::prerank_with(std::span<const double> v_qu,
                                                    std::vector<Candidate> candidates,
                                                    std::size_t n) const {
  if (candidates.empty()) return candidates;
  const std::vector<double> q_part = model::query_part(v_qu, head_.weight, head_.bias);
  ++stats_.query_part_computations;
  for (Candidate& c : candidates) {
    const std::vector<double>* a_part = ad_parts_ ? ad_parts_->find(c.ad_id) : nullptr;
    if (a_part) {
      c.prerank_score = model::prerank_prob_split(head_, q_part, *a_part);
    } else {
      ++stats_.ad_part_fallbacks;
      log::warn(fmt::format("no precomputed ad part for ad {}; scoring directly", c.ad_id));
      c.prerank_score = model::prerank_prob_direct(head_, v_qu, raw_ad_vector(c.ad_id));
    }
    if (config_.verify_split) {
      const double direct = model::prerank_prob_direct(head_, v_qu, raw_ad_vector(c.ad_id));
      ++stats_.split_checks;
      stats_.max_split_deviation =
          std::max(stats_.max_split_deviation, std::fabs(direct - c.prerank_score));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.prerank_score != b.prerank_score ? a.prerank_score > b.prerank_score : a.ad_id < b.ad_id;
  });
  if (candidates.size() > n) candidates.resize(n);
  return candidates;
}

std::vector<Candidate> MatchingEngine::retrieve(const model::QueryRequest& request,
                                                std::string_view raw_query) const {
  std::vector<double> v_qu;
  if (config_.vector_path) v_qu = model_.qu_vector(params_, request);
  return retrieve_with(v_qu, raw_query);
}

std::vector<Candidate> MatchingEngine::prerank(const model::QueryRequest& request,
                                               std::vector<Candidate> candidates,
                                               std::size_t n) const {
  if (candidates.empty()) return candidates;
  return prerank_with(model_.qu_vector(params_, request), std::move(candidates), n);
}

std::vector<Candidate> MatchingEngine::match(const model::QueryRequest& request,
                                             std::string_view raw_query) const {
  ++stats_.requests;
  const std::vector<double> v_qu = model_.qu_vector(params_, request);
  return prerank_with(v_qu, retrieve_with(v_qu, raw_query), config_.top_n);
}

}  // namespace admatch::pipeline
