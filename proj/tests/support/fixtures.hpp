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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "admatch/dataio/instances.hpp"
#include "admatch/dataio/synthetic.hpp"
#include "admatch/dataio/vocabulary.hpp"
#include "admatch/model/config.hpp"
#include "admatch/model/features.hpp"

namespace admatch::testing {

struct SmallCorpus {
  dataio::SyntheticCorpus corpus;
  dataio::Vocabulary vocab;
  std::vector<model::ImpressionInstance> instances;
};

// A few hundred users over four days, cached per process.
inline const SmallCorpus& small_corpus() {
  static const SmallCorpus c = [] {
    SmallCorpus s;
    dataio::SyntheticConfig cfg;
    cfg.n_users = 120;
    cfg.n_items = 200;
    s.corpus = dataio::generate_synthetic(cfg);
    s.vocab = dataio::build_vocab(s.corpus.records, dataio::TopK::uniform(dataio::kUnlimitedTopK));
    s.instances = dataio::make_instances(s.corpus.records, s.vocab, 6);
    return s;
  }();
  return c;
}

// Narrow widths so scalar oracles and finite differences stay fast.
inline model::EncoderConfig tiny_config(const dataio::Vocabulary& vocab,
                                        model::EncoderVariant variant = model::EncoderVariant::kAttentionGruRnn,
                                        bool share = true) {
  model::EncoderConfig c;
  c.vocab_sizes = vocab.sizes();
  c.variant = variant;
  c.share_tower = share;
  c.embedding_dim = 4;
  c.window = 6;
  c.gru_hidden = 5;
  c.attention_hidden = 4;
  c.tower_dims = {6, 5};
  c.prerank_hidden = 4;
  return c;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("admatch_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace admatch::testing
