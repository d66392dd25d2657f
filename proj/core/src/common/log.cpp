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

#include "admatch/common/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace admatch::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex mu;
  return mu;
}

Sink& current_sink() {
  static Sink sink;
  return sink;
}

bool& verbose_flag() {
  static bool verbose = true;
  return verbose;
}

void emit(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (level == Level::kInfo && !verbose_flag()) return;
  if (current_sink()) {
    current_sink()(level, message);
    return;
  }
  const char* tag = level == Level::kInfo      ? "I"
                    : level == Level::kWarning ? "W"
                                               : "E";
  std::cerr << tag << " " << message << '\n';
}

}  // namespace

void info(std::string_view message) { emit(Level::kInfo, message); }
void warn(std::string_view message) { emit(Level::kWarning, message); }
void error(std::string_view message) { emit(Level::kError, message); }

void set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void set_verbose(bool verbose) {
  std::lock_guard lock(sink_mutex());
  verbose_flag() = verbose;
}

}  // namespace admatch::log
