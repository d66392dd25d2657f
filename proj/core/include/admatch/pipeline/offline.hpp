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

#include <span>
#include <vector>

#include "admatch/dataio/log_record.hpp"
#include "admatch/dataio/vocabulary.hpp"
#include "admatch/model/model.hpp"
#include "admatch/pipeline/ad_parts.hpp"

namespace admatch::pipeline {

// Offline batch jobs over the ad catalog.

struct AdVector {
  AdId ad_id = 0;
  std::vector<double> vector;  // unit norm
};

// Ad-Net forward pass for every ad, L2-normalized. Ads whose output has zero
// norm are skipped with a warning.
std::vector<AdVector> export_ad_vectors(const model::Model& model,
                                        const numkit::ParamStore& params,
                                        std::span<const dataio::AdDescriptor> ads,
                                        const dataio::Vocabulary& vocab);

AdPartsTable precompute_ad_parts(const model::Model& model, const numkit::ParamStore& params,
                                 std::span<const dataio::AdDescriptor> ads,
                                 const dataio::Vocabulary& vocab);

}  // namespace admatch::pipeline
