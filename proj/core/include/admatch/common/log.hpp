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
#include <string_view>

namespace admatch::log {

enum class Level { kInfo, kWarning, kError };

void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

// Replaces the stderr sink; pass an empty function to restore it.
using Sink = std::function<void(Level, std::string_view)>;
void set_sink(Sink sink);

// Suppresses kInfo messages when false.
void set_verbose(bool verbose);

}  // namespace admatch::log
