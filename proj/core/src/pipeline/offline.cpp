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

#include "admatch/pipeline/offline.hpp"

#include <fmt/format.h>

#include "admatch/common/log.hpp"
#include "admatch/dataio/instances.hpp"
#include "admatch/model/heads.hpp"

namespace admatch::pipeline {
namespace {

std::vector<model::AdItem> to_items(std::span<const dataio::AdDescriptor> ads,
                                    const dataio::Vocabulary& vocab) {
  std::vector<model::AdItem> items;
  items.reserve(ads.size());
  for (const auto& ad : ads) items.push_back(dataio::to_ad_item(ad.item, vocab));
  return items;
}

}  // namespace

std::vector<AdVector> export_ad_vectors(const model::Model& model,
                                        const numkit::ParamStore& params,
                                        std::span<const dataio::AdDescriptor> ads,
                                        const dataio::Vocabulary& vocab) {
  const auto items = to_items(ads, vocab);
  const auto raw = model.ad_vectors(params, items);
  std::vector<AdVector> out;
  out.reserve(ads.size());
  for (std::size_t i = 0; i < ads.size(); ++i) {
    const double n = numkit::l2_norm(raw[i]);
    if (n == 0.0) {
      log::warn(fmt::format("ad {} has a zero-norm vector; skipped", ads[i].ad_id));
      continue;
    }
    AdVector v{ads[i].ad_id, raw[i]};
    for (double& x : v.vector) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

AdPartsTable precompute_ad_parts(const model::Model& model, const numkit::ParamStore& params,
                                 std::span<const dataio::AdDescriptor> ads,
                                 const dataio::Vocabulary& vocab) {
  const auto items = to_items(ads, vocab);
  const auto raw = model.ad_vectors(params, items);
  const model::PrerankHead head = model.prerank_head(params);
  AdPartsTable table(head.bias.size());
  for (std::size_t i = 0; i < ads.size(); ++i) {
    table.set(ads[i].ad_id, model::ad_part(raw[i], head.weight));
  }
  return table;
}

}  // namespace admatch::pipeline
