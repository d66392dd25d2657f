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
#include <map>
#include <string>

#include "admatch/numkit/param_store.hpp"

namespace admatch::trainer {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moment state is keyed by parameter name and
// created lazily on the first step.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  // Applies one update from the gradients held in `store` to every
  // trainable entry, skipping row 0 of frozen_row0 entries, then re-zeroes
  // pad rows. Gradients are left untouched.
  void step(numkit::ParamStore& store);

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::map<std::string, Moments> state_;
};

}  // namespace admatch::trainer
