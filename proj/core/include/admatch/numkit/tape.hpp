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

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "admatch/numkit/param_store.hpp"
#include "admatch/numkit/tensor.hpp"

namespace admatch::numkit {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records one forward pass for reverse-mode differentiation. Parameter
// leaves read values from a const ParamStore, so several tapes may share one
// store concurrently; gradients stay on the tape until accumulate_into().
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  explicit Tape(const ParamStore& store) : store_(&store) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf for a named parameter. Repeated calls return the same node.
  Var param(const std::string& name);

  Var record(Tensor value, std::span<const Var> inputs, Backward backward);
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Zero-initialized gradient buffer of node `id`, for in-place accumulation
  // by backward functions. Only valid during backward().
  Tensor& grad_buffer(std::size_t id);
  // Gradient of node `id`, or nullptr if none reached it.
  const Tensor* grad(std::size_t id) const;

  // Seeds d(loss)/d(loss) = 1 and runs every recorded backward function in
  // reverse order. `loss` must hold exactly one element.
  void backward(Var loss);

  // Adds parameter-leaf gradients into `store` (trainable entries only; row
  // 0 of frozen_row0 entries is skipped).
  void accumulate_into(ParamStore& store) const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t backward_calls() const { return backward_calls_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    Backward backward;
    std::string param_name;
  };

  const ParamStore* store_ = nullptr;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> param_ids_;
  std::size_t backward_calls_ = 0;
  bool backward_done_ = false;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }

}  // namespace admatch::numkit
