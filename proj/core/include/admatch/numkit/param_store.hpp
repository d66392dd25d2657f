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

#include <map>
#include <string>
#include <vector>

#include "admatch/numkit/tensor.hpp"

namespace admatch::numkit {

struct Param {
  Tensor value;
  Tensor grad;
  bool trainable = true;
  // Row 0 is a reserved pad row: held at zero and never updated.
  bool frozen_row0 = false;
};

// Named parameter tensors with matching gradient buffers. Iteration order
// is lexicographic by name, which keeps serialization and optimizer state
// deterministic.
class ParamStore {
 public:
  Param& add(const std::string& name, Tensor value, bool trainable = true,
             bool frozen_row0 = false);

  bool contains(const std::string& name) const { return entries_.contains(name); }
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;

  void zero_grad();
  // Writes zeros into row 0 of every frozen_row0 entry (value and grad).
  void zero_pad_rows();

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t value_count() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // True when every entry has identical names, flags and bitwise values.
  bool same_values(const ParamStore& other) const;

 private:
  std::map<std::string, Param> entries_;
};

}  // namespace admatch::numkit
