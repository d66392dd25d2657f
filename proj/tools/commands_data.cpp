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

#include <algorithm>
#include <array>
#include <iostream>

#include <fmt/format.h>

#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/dataio/instances.hpp"
#include "admatch/dataio/synthetic.hpp"
#include "commands.hpp"

namespace admatch::cli {

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--logs", o.logs, "Impression logs (JSON Lines)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--vocab", o.vocab, "Vocabulary TSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--first-train-day", o.first_train_day,
                  "First training day YYYY-MM-DD (default: earliest day in the logs)");
  cmd->add_option("--train-days", o.train_days, "Consecutive training days; the next day is the test day")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--validation-fraction", o.validation_fraction, "Hash-sampled share of training held out")
      ->check(CLI::Range(0.0, 0.99));
}

Dataset load_dataset(const DataOptions& o, std::size_t window) {
  Dataset d;
  d.logs = dataio::read_logs(o.logs);
  d.vocab = dataio::Vocabulary::load_tsv(o.vocab);
  d.instances = dataio::make_instances(d.logs, d.vocab, window);
  std::string first = o.first_train_day;
  if (first.empty()) {
    if (d.logs.empty()) throw EmptyCorpusError("no log records in " + o.logs);
    first = std::min_element(d.logs.begin(), d.logs.end(), [](const auto& a, const auto& b) {
              return a.day < b.day;
            })->day;
  }
  dataio::DatasetSplit split = dataio::DatasetSplit::consecutive(first, o.train_days);
  split.validation_fraction = o.validation_fraction;
  d.parts = dataio::split_by_day(d.instances, split);
  log::info(fmt::format("{} instances: {} train, {} validation, {} test ({})", d.instances.size(),
                        d.parts.train.size(), d.parts.validation.size(), d.parts.test.size(),
                        split.test_day));
  return d;
}

namespace {

struct GenOptions {
  dataio::SyntheticConfig config;
  std::string out_logs;
  std::string out_ads;
};

struct VocabOptions {
  std::string logs;
  std::string out;
  std::size_t top_k = dataio::kUnlimitedTopK;
  std::array<std::size_t, model::kNumSpaces> per_space{};
};

}  // namespace

void add_data_commands(CLI::App& app, std::uint64_t& seed) {
  auto gen = std::make_shared<GenOptions>();
  auto* g = app.add_subcommand("gen-data", "Generate planted synthetic impression logs and an ad catalog");
  g->add_option("--out-logs", gen->out_logs, "Output logs (JSON Lines)")->required();
  g->add_option("--out-ads", gen->out_ads, "Output ad catalog (JSON Lines)")->required();
  auto& c = gen->config;
  g->add_option("--users", c.n_users, "Number of users")->capture_default_str();
  g->add_option("--items", c.n_items, "Catalog size")->capture_default_str();
  g->add_option("--categories", c.n_categories, "Latent categories")->capture_default_str();
  g->add_option("--days", c.days, "Days of logs")->capture_default_str();
  g->add_option("--start-day", c.start_day, "First day, YYYY-MM-DD")->capture_default_str();
  g->add_option("--p-hi", c.p_hi, "Click rate when the ad matches the intent")->capture_default_str();
  g->add_option("--p-lo", c.p_lo, "Click rate otherwise")->capture_default_str();
  g->add_option("--long-tail-fraction", c.long_tail_fraction, "Share of long-tail sessions")
      ->capture_default_str();
  g->add_option("--sessions-per-day", c.sessions_per_day, "Mean sessions per user and day, in [1, 3]")
      ->capture_default_str();
  g->callback([gen, &seed] {
    gen->config.seed = seed;
    const dataio::SyntheticCorpus corpus = dataio::generate_synthetic(gen->config);
    dataio::write_logs(gen->out_logs, corpus.records);
    dataio::write_ads(gen->out_ads, corpus.ads);
    log::info(fmt::format("wrote {} records and {} ads", corpus.records.size(), corpus.ads.size()));
  });

  auto voc = std::make_shared<VocabOptions>();
  auto* v = app.add_subcommand("build-vocab", "Build per-space vocabularies truncated to the most frequent tokens");
  v->add_option("--logs", voc->logs, "Impression logs (JSON Lines)")->required()->check(CLI::ExistingFile);
  v->add_option("--out", voc->out, "Output TSV")->required();
  v->add_option("--top-k", voc->top_k, "Tokens kept per space (default: all)")->check(CLI::PositiveNumber);
  for (model::IdSpace s : model::kAllSpaces) {
    const std::string name(model::space_name(s));
    std::string flag = "--top-k-" + name.substr(0, name.find('_'));
    v->add_option(flag, voc->per_space[static_cast<std::size_t>(s)],
                  "Override --top-k for " + name)->check(CLI::PositiveNumber);
  }
  v->callback([voc] {
    const auto logs = dataio::read_logs(voc->logs);
    dataio::TopK k = dataio::TopK::uniform(voc->top_k);
    for (std::size_t i = 0; i < model::kNumSpaces; ++i) {
      if (voc->per_space[i] != 0) k.per_space[i] = voc->per_space[i];
    }
    const dataio::Vocabulary vocab = dataio::build_vocab(logs, k);
    vocab.save_tsv(voc->out);
    std::string sizes;
    for (model::IdSpace s : model::kAllSpaces) {
      sizes += fmt::format(" {}={}", model::space_name(s), vocab.size(s));
    }
    log::info("vocabulary sizes (with pad):" + sizes);
  });
}

}  // namespace admatch::cli
