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

#include <functional>
#include <string>

#include "admatch/numkit/param_store.hpp"
#include "admatch/numkit/tape.hpp"

namespace admatch::numkit {

// Scalar objective built on a fresh tape bound to the store being checked.
using Objective = std::function<Var(Tape&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Relative error |a - n| / max(|a|, |n|, kGradCheckFloor); zero when both
// are exactly zero. The floor keeps round-off on near-zero gradients from
// dominating.
inline constexpr double kGradCheckFloor = 1e-6;
double relative_error(double analytic, double numeric);

// Compares the reverse-mode gradient of every trainable element in `store`
// against central finite differences with step `epsilon` (in [1e-6, 1e-4]).
// Throws DeterminismError if two forward passes disagree. Values in `store`
// are restored; gradients are left holding the analytic result.
GradCheckResult grad_check(const Objective& f, ParamStore& store, double epsilon = 1e-5);

}  // namespace admatch::numkit
