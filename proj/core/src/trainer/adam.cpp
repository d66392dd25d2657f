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

#include "admatch/trainer/adam.hpp"

#include <cmath>
#include <utility>

#include "admatch/common/error.hpp"

namespace admatch::trainer {

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0) || !(config_.beta1 >= 0.0 && config_.beta1 < 1.0) ||
      !(config_.beta2 >= 0.0 && config_.beta2 < 1.0) || !(config_.epsilon > 0.0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
}

void Adam::step(numkit::ParamStore& store) {
  ++t_;
  const double lr = config_.learning_rate;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (auto& [name, p] : store) {
    if (!p.trainable) continue;
    auto value = p.value.data();
    const auto grad = std::as_const(p.grad).data();
    Moments& mom = state_[name];
    if (mom.m.size() != value.size()) {
      mom.m.assign(value.size(), 0.0);
      mom.v.assign(value.size(), 0.0);
    }
    const std::size_t begin = p.frozen_row0 ? p.value.cols() : 0;
    for (std::size_t i = begin; i < value.size(); ++i) {
      const double g = grad[i];
      mom.m[i] = b1 * mom.m[i] + (1.0 - b1) * g;
      mom.v[i] = b2 * mom.v[i] + (1.0 - b2) * g * g;
      const double m_hat = mom.m[i] / c1;
      const double v_hat = mom.v[i] / c2;
      value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
  store.zero_pad_rows();
}

}  // namespace admatch::trainer
