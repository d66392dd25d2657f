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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "admatch/model/features.hpp"
#include "admatch/pipeline/matching_engine.hpp"

namespace admatch::pipeline {

struct SimConfig {
  std::uint64_t seed = 1;
  // Ads shown per request: the head of the pre-ranked list.
  std::size_t present_slots = 3;
  double p_hi = 0.6;
  double p_lo = 0.05;
};

struct SimCounters {
  std::uint64_t requests = 0;
  std::uint64_t presents = 0;
  std::uint64_t clicks = 0;
  double cost = 0.0;

  SimCounters& operator+=(const SimCounters& other);
};

// Undefined ratios stay empty rather than reading as zero.
struct SimMetrics {
  std::optional<double> ctr;  // clicks / presents
  std::optional<double> pr;   // presents / requests
  std::optional<double> cpc;  // cost / clicks
  std::optional<double> rpm;  // ctr * cpc

  static SimMetrics from(const SimCounters& c);
};

struct Impression {
  std::size_t request = 0;
  std::string user_id;
  std::int64_t timestamp = 0;
  std::string query;
  std::size_t rank = 0;
  Candidate candidate;
  bool clicked = false;
};

struct SimResult {
  SimCounters counters;
  SimMetrics metrics;
  EngineStats engine;
  std::vector<Impression> impressions;
};

// Distinct (user, timestamp) requests from an instance stream, in order.
std::vector<const model::ImpressionInstance*> distinct_requests(
    std::span<const model::ImpressionInstance> instances);

// Replays each request through the engine, presents the top slots and draws
// clicks from the planted oracle: p_hi when the ad's category equals the
// request's intent, else p_lo. The draw for request i uses its own seeded
// stream. Throws ConfigError when ground-truth categories are missing.
SimResult simulate(const MatchingEngine& engine,
                   std::span<const model::ImpressionInstance* const> requests,
                   const AdCatalog& catalog, const SimConfig& config);

nlohmann::json metrics_json(const SimResult& result, const EngineConfig& engine);
void write_impressions_jsonl(const std::filesystem::path& path, std::span<const Impression> impressions);

}  // namespace admatch::pipeline
