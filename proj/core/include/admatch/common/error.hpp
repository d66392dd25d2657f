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

#include <stdexcept>
#include <string>

namespace admatch {

// Root of every error the library throws. Each subclass carries a short,
// stable kind() string that the command-line tool prints on failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define ADMATCH_DEFINE_ERROR(Name, Kind)                       \
  class Name : public Error {                                  \
   public:                                                     \
    using Error::Error;                                        \
    const char* kind() const noexcept override { return Kind; } \
  }

ADMATCH_DEFINE_ERROR(DimensionError, "dimension");
ADMATCH_DEFINE_ERROR(DegenerateVectorError, "degenerate-vector");
ADMATCH_DEFINE_ERROR(DeterminismError, "determinism");
ADMATCH_DEFINE_ERROR(VocabularyError, "vocabulary");
ADMATCH_DEFINE_ERROR(EmptyCorpusError, "empty-corpus");
ADMATCH_DEFINE_ERROR(CoverageError, "coverage");
ADMATCH_DEFINE_ERROR(DivergenceError, "divergence");
ADMATCH_DEFINE_ERROR(UndefinedAucError, "undefined-auc");
ADMATCH_DEFINE_ERROR(QuantizerTrainingError, "pq-training");
ADMATCH_DEFINE_ERROR(FormatError, "format");
ADMATCH_DEFINE_ERROR(ConfigError, "config");
ADMATCH_DEFINE_ERROR(NotFoundError, "not-found");

#undef ADMATCH_DEFINE_ERROR

}  // namespace admatch
