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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "admatch/annindex/ann_index.hpp"
#include "admatch/dataio/log_record.hpp"
#include "admatch/dataio/vocabulary.hpp"
#include "admatch/model/model.hpp"
#include "admatch/pipeline/ad_parts.hpp"
#include "admatch/pipeline/bidword_index.hpp"

namespace admatch::pipeline {

enum class Path : std::uint8_t { kKeyword = 1, kVector = 2 };

struct Candidate {
  AdId ad_id = 0;
  std::uint8_t paths = 0;  // bitmask of Path
  std::optional<double> retrieval_score;  // cosine, vector path only
  double prerank_score = 0.0;
  double cost = 0.0;

  bool has(Path p) const { return (paths & static_cast<std::uint8_t>(p)) != 0; }
  std::vector<std::string> path_names() const;
};

struct AdInfo {
  model::AdItem item;
  double cost = 0.0;
  int category = -1;
};

using AdCatalog = std::unordered_map<AdId, AdInfo>;
AdCatalog make_catalog(std::span<const dataio::AdDescriptor> ads, const dataio::Vocabulary& vocab);

struct EngineConfig {
  bool keyword_path = true;
  bool vector_path = true;
  std::size_t k_vector = 500;
  std::size_t overfetch = 10;
  std::size_t top_n = 200;
  // Also score every candidate directly and track the largest split/direct
  // gap (costs one Ad-Net pass per catalog ad up front).
  bool verify_split = false;
};

struct EngineStats {
  std::uint64_t requests = 0;
  std::uint64_t query_part_computations = 0;
  std::uint64_t ad_part_fallbacks = 0;
  std::uint64_t split_checks = 0;
  double max_split_deviation = 0.0;
};

// Retrieval over the keyword and vector paths followed by global pre-ranking
// through the split first layer. Holds references to its inputs; they must
// outlive the engine. Not safe for concurrent match() calls on one engine.
class MatchingEngine {
 public:
  // `ann` and `ad_parts` may be null when the vector path is off or every ad
  // part is to be computed on the fly.
  MatchingEngine(const model::Model& model, const numkit::ParamStore& params,
                 const BidwordIndex& bidwords, const annindex::AnnIndex* ann,
                 const AdPartsTable* ad_parts, const AdCatalog& catalog, EngineConfig config);

  const EngineConfig& config() const { return config_; }
  const EngineStats& stats() const { return stats_; }

  // Union of both paths, deduplicated by ad id, ascending ids. Ads missing
  // from the catalog are dropped.
  std::vector<Candidate> retrieve(const model::QueryRequest& request,
                                  std::string_view raw_query) const;
  // Scores candidates with one query-part computation and returns the best
  // n by pre-rank score (ties to the smaller id).
  std::vector<Candidate> prerank(const model::QueryRequest& request,
                                 std::vector<Candidate> candidates, std::size_t n) const;
  // retrieve + prerank with a single Qu-Net pass.
  std::vector<Candidate> match(const model::QueryRequest& request, std::string_view raw_query) const;

 private:
  std::vector<Candidate> retrieve_with(std::span<const double> v_qu, std::string_view raw_query) const;
  std::vector<Candidate> prerank_with(std::span<const double> v_qu, std::vector<Candidate> candidates,
                                      std::size_t n) const;
  const std::vector<double>& raw_ad_vector(AdId id) const;

  const model::Model& model_;
  const numkit::ParamStore& params_;
  const BidwordIndex& bidwords_;
  const annindex::AnnIndex* ann_;
  const AdPartsTable* ad_parts_;
  const AdCatalog& catalog_;
  EngineConfig config_;
  model::PrerankHead head_;
  mutable std::unordered_map<AdId, std::vector<double>> raw_vectors_;
  mutable EngineStats stats_;
};

}  // namespace admatch::pipeline
