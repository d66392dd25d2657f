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

#include "admatch/numkit/tape.hpp"

#include "admatch/common/error.hpp"

namespace admatch::numkit {

Var Tape::constant(Tensor value) {
  Node node;
  node.owned = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const std::string& name) {
  if (auto it = param_ids_.find(name); it != param_ids_.end()) return Var(this, it->second);
  if (store_ == nullptr) throw ConfigError("tape has no parameter store; cannot bind " + name);
  const Param& p = store_->at(name);
  Node node;
  node.external = &p.value;
  node.requires_grad = p.trainable;
  node.param_name = name;
  nodes_.push_back(std::move(node));
  param_ids_.emplace(name, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::span<const Var> inputs, Backward backward) {
  Node node;
  node.owned = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape_ != this) throw ConfigError("operand recorded on a different tape");
    node.requires_grad = node.requires_grad || nodes_[v.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.owned;
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor(value(id).shape(), 0.0);
    n.has_grad = true;
  }
  return n.grad;
}

const Tensor* Tape::grad(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.has_grad ? &n.grad : nullptr;
}

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw ConfigError("loss recorded on a different tape");
  if (backward_done_) throw ConfigError("backward() already ran on this tape");
  if (value(loss.id_).size() != 1) {
    throw DimensionError("backward needs a scalar loss, got " +
                         shape_string(value(loss.id_).shape()));
  }
  backward_done_ = true;
  grad_buffer(loss.id_)[0] = 1.0;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
    ++backward_calls_;
  }
}

void Tape::accumulate_into(ParamStore& store) const {
  for (const auto& [name, id] : param_ids_) {
    const Node& n = nodes_[id];
    if (!n.has_grad) continue;
    Param& p = store.at(name);
    if (!p.trainable) continue;
    if (p.grad.shape() != n.grad.shape()) {
      throw DimensionError("gradient shape mismatch for " + name);
    }
    const std::size_t skip = p.frozen_row0 ? p.value.cols() : 0;
    auto dst = p.grad.data();
    auto src = n.grad.data();
    for (std::size_t i = skip; i < dst.size(); ++i) dst[i] += src[i];
  }
}

}  // namespace admatch::numkit
