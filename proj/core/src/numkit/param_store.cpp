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

#include "admatch/numkit/param_store.hpp"

#include <cstring>

#include "admatch/common/error.hpp"

namespace admatch::numkit {

Param& ParamStore::add(const std::string& name, Tensor value, bool trainable, bool frozen_row0) {
  if (entries_.contains(name)) throw ConfigError("duplicate parameter name: " + name);
  Param p;
  p.grad = Tensor(value.shape(), 0.0);
  p.value = std::move(value);
  p.trainable = trainable;
  p.frozen_row0 = frozen_row0;
  auto [it, _] = entries_.emplace(name, std::move(p));
  return it->second;
}

Param& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [_, p] : entries_) p.grad.fill(0.0);
}

void ParamStore::zero_pad_rows() {
  for (auto& [_, p] : entries_) {
    if (!p.frozen_row0) continue;
    for (double& v : p.value.row(0)) v = 0.0;
    for (double& v : p.grad.row(0)) v = 0.0;
  }
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::value_count() const {
  std::size_t n = 0;
  for (const auto& [_, p] : entries_) n += p.value.size();
  return n;
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (auto a = entries_.begin(), b = other.entries_.begin(); a != entries_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.trainable != b->second.trainable ||
        a->second.frozen_row0 != b->second.frozen_row0 ||
        a->second.value.shape() != b->second.value.shape()) {
      return false;
    }
    const auto x = a->second.value.data();
    const auto y = b->second.value.data();
    if (std::memcmp(x.data(), y.data(), x.size_bytes()) != 0) return false;
  }
  return true;
}

}  // namespace admatch::numkit
