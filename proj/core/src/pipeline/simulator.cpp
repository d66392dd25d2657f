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

#include "admatch/pipeline/simulator.hpp"

#include <fstream>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "admatch/common/error.hpp"
#include "admatch/common/random.hpp"

namespace admatch::pipeline {

SimCounters& SimCounters::operator+=(const SimCounters& o) {
  requests += o.requests;
  presents += o.presents;
  clicks += o.clicks;
  cost += o.cost;
  return *this;
}

SimMetrics SimMetrics::from(const SimCounters& c) {
  SimMetrics m;
  if (c.presents > 0) m.ctr = static_cast<double>(c.clicks) / static_cast<double>(c.presents);
  if (c.requests > 0) m.pr = static_cast<double>(c.presents) / static_cast<double>(c.requests);
  if (c.clicks > 0) m.cpc = c.cost / static_cast<double>(c.clicks);
  if (m.ctr && m.cpc) m.rpm = *m.ctr * *m.cpc;
  return m;
}

std::vector<const model::ImpressionInstance*> distinct_requests(
    std::span<const model::ImpressionInstance> instances) {
  std::set<std::pair<std::string, std::int64_t>> seen;
  std::vector<const model::ImpressionInstance*> out;
  for (const auto& inst : instances) {
    if (seen.emplace(inst.meta.user_id, inst.meta.timestamp).second) out.push_back(&inst);
  }
  return out;
}

SimResult simulate(const MatchingEngine& engine,
                   std::span<const model::ImpressionInstance* const> requests,
                   const AdCatalog& catalog, const SimConfig& config) {
  if (!(config.p_hi >= 0.0 && config.p_hi <= 1.0 && config.p_lo >= 0.0 && config.p_lo <= 1.0)) {
    throw ConfigError("click probabilities must lie in [0, 1]");
  }
  SimResult result;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const model::ImpressionInstance& req = *requests[i];
    if (req.meta.intent_category < 0) {
      throw ConfigError(fmt::format("request {} has no intent category; simulation needs synthetic logs", i));
    }
    ++result.counters.requests;
    const std::vector<Candidate> ranked = engine.match(req.request, req.meta.raw_query);
    Rng rng(mix_seed(config.seed, i));
    const std::size_t shown = std::min(config.present_slots, ranked.size());
    for (std::size_t r = 0; r < shown; ++r) {
      const Candidate& c = ranked[r];
      const int category = catalog.at(c.ad_id).category;
      if (category < 0) throw ConfigError(fmt::format("ad {} has no category", c.ad_id));
      const bool clicked =
          rng.bernoulli(category == req.meta.intent_category ? config.p_hi : config.p_lo);
      ++result.counters.presents;
      if (clicked) {
        ++result.counters.clicks;
        result.counters.cost += c.cost;
      }
      result.impressions.push_back(
          {i, req.meta.user_id, req.meta.timestamp, req.meta.raw_query, r + 1, c, clicked});
    }
  }
  result.metrics = SimMetrics::from(result.counters);
  result.engine = engine.stats();
  return result;
}

nlohmann::json metrics_json(const SimResult& r, const EngineConfig& engine) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json paths = nlohmann::json::array();
  if (engine.keyword_path) paths.push_back("keyword");
  if (engine.vector_path) paths.push_back("vector");
  return {
      {"paths", paths},
      {"top_n", engine.top_n},
      {"k_vector", engine.k_vector},
      {"requests", r.counters.requests},
      {"presents", r.counters.presents},
      {"clicks", r.counters.clicks},
      {"cost", r.counters.cost},
      {"ctr", opt(r.metrics.ctr)},
      {"pr", opt(r.metrics.pr)},
      {"cpc", opt(r.metrics.cpc)},
      {"rpm", opt(r.metrics.rpm)},
      {"rpm_definition", "ctr * cpc"},
      {"query_part_computations", r.engine.query_part_computations},
      {"ad_part_fallbacks", r.engine.ad_part_fallbacks},
      {"split_checks", r.engine.split_checks},
      {"max_split_deviation", r.engine.max_split_deviation},
  };
}

void write_impressions_jsonl(const std::filesystem::path& path, std::span<const Impression> impressions) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  for (const auto& imp : impressions) {
    nlohmann::json j = {
        {"request", imp.request},
        {"user_id", imp.user_id},
        {"timestamp", imp.timestamp},
        {"query", imp.query},
        {"rank", imp.rank},
        {"ad_id", imp.candidate.ad_id},
        {"paths", imp.candidate.path_names()},
        {"retrieval_score", imp.candidate.retrieval_score ? nlohmann::json(*imp.candidate.retrieval_score)
                                                          : nlohmann::json(nullptr)},
        {"prerank_score", imp.candidate.prerank_score},
        {"cost", imp.candidate.cost},
        {"clicked", imp.clicked ? 1 : 0},
    };
    out << j.dump() << '\n';
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace admatch::pipeline
