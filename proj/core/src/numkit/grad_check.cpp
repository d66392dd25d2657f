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

#include "admatch/numkit/grad_check.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "admatch/common/error.hpp"

namespace admatch::numkit {
namespace {

double evaluate(const Objective& f, const ParamStore& store) {
  Tape tape(store);
  Var loss = f(tape);
  if (loss.value().size() != 1) throw DimensionError("objective must be scalar");
  return loss.value()[0];
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  if (diff == 0.0) return 0.0;
  return diff / std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
}

GradCheckResult grad_check(const Objective& f, ParamStore& store, double epsilon) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-4)) {
    throw std::invalid_argument("grad_check epsilon must lie in [1e-6, 1e-4]");
  }
  store.zero_grad();
  double base = 0.0;
  {
    Tape tape(store);
    Var loss = f(tape);
    if (loss.value().size() != 1) throw DimensionError("objective must be scalar");
    base = loss.value()[0];
    tape.backward(loss);
    tape.accumulate_into(store);
  }
  const double again = evaluate(f, store);
  if (std::bit_cast<std::uint64_t>(again) != std::bit_cast<std::uint64_t>(base)) {
    throw DeterminismError("objective is not deterministic: " + std::to_string(base) + " vs " +
                           std::to_string(again));
  }

  GradCheckResult result;
  for (auto& [name, param] : store) {
    if (!param.trainable) continue;
    auto values = param.value.data();
    const std::size_t skip = param.frozen_row0 ? param.value.cols() : 0;
    for (std::size_t i = skip; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double plus = evaluate(f, store);
      values[i] = saved - epsilon;
      const double minus = evaluate(f, store);
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double analytic = param.grad[i];
      const double err = relative_error(analytic, numeric);
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace admatch::numkit
