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

#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/common/random.hpp"
#include "admatch/evaluator/experiments.hpp"
#include "admatch/evaluator/metrics.hpp"
#include "admatch/model/checkpoint.hpp"
#include "admatch/model/model.hpp"
#include "commands.hpp"

namespace admatch::cli {
namespace {

struct EncoderFlags {
  std::string variant = "ATTENTION_GRU_RNN";
  std::string activation = "tanh";
};

struct ModelRun {
  DataOptions data;
  model::EncoderConfig encoder;
  EncoderFlags flags;
  trainer::TrainConfig train;
  std::string mode = "JOINT";
};

void finish_encoder(ModelRun& r, const dataio::Vocabulary& vocab) {
  r.encoder.variant = model::parse_variant(r.flags.variant);
  r.encoder.activation = model::parse_activation(r.flags.activation);
  r.encoder.vocab_sizes = vocab.sizes();
  r.encoder.validate();
  r.train.mode = trainer::parse_mode(r.mode);
}

// Initialization and shuffling draw from separate streams of one seed.
std::uint64_t init_seed(std::uint64_t seed) { return mix_seed(seed, 1); }
std::uint64_t shuffle_seed(std::uint64_t seed) { return mix_seed(seed, 2); }

void add_run_options(CLI::App* cmd, ModelRun& r) {
  add_data_options(cmd, r.data);
  std::vector<std::string> variants;
  for (auto v : model::kAllVariants) variants.emplace_back(model::variant_name(v));
  cmd->add_option("--variant", r.flags.variant, "Behavior encoder")
      ->check(CLI::IsMember(variants))
      ->capture_default_str();
  cmd->add_option("--activation", r.flags.activation, "Hidden-layer activation")
      ->check(CLI::IsMember({"tanh", "relu"}))
      ->capture_default_str();
  add_encoder_options(cmd, r.encoder);
  add_train_options(cmd, r.train);
  cmd->add_option("--mode", r.mode, "Training objective")
      ->check(CLI::IsMember({"JOINT", "SINGLE_RETRIEVAL", "SINGLE_PRERANK"}))
      ->capture_default_str();
}

double safe_auc(std::span<const double> s, std::span<const double> y) {
  try {
    return evaluator::auc(s, y);
  } catch (const UndefinedAucError&) {
    return std::nan("");
  }
}

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

struct TrainOptions {
  ModelRun run;
  std::string out;
  std::string final_out;
  std::string history;
  std::string summary;
};

struct EvalOptions {
  DataOptions data;
  std::string checkpoint;
  std::string split = "test";
  std::string out;
};

struct SweepOptions {
  ModelRun run;
  std::vector<double> gammas = {1.0, 3.0, 6.0, 9.0};
  std::string out_csv;
};

struct AblationOptions {
  ModelRun run;
  std::string out_csv;
};

}  // namespace

void add_encoder_options(CLI::App* cmd, model::EncoderConfig& c) {
  cmd->add_option("--embedding-dim", c.embedding_dim, "Embedding width")->capture_default_str();
  cmd->add_option("--window", c.window, "Behavior window m")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--gru-hidden", c.gru_hidden, "GRU state width")->capture_default_str();
  cmd->add_option("--attention-hidden", c.attention_hidden, "Attention hidden width")->capture_default_str();
  cmd->add_option("--tower-dims", c.tower_dims, "Widths of the two shared layers; the second is d")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--prerank-hidden", c.prerank_hidden, "Pre-rank hidden width")->capture_default_str();
  cmd->add_flag("--share-tower,!--no-share-tower", c.share_tower, "Share the tower layers between sides");
  cmd->add_option("--gamma", c.gamma, "Cosine scale in the retrieval head")->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "Retrieval weight in the joint loss")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
}

void add_train_options(CLI::App* cmd, trainer::TrainConfig& c) {
  cmd->add_option("--batch-size", c.batch_size, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lr", c.adam.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--beta1", c.adam.beta1, "Adam beta1")->capture_default_str();
  cmd->add_option("--beta2", c.adam.beta2, "Adam beta2")->capture_default_str();
  cmd->add_option("--adam-epsilon", c.adam.epsilon, "Adam epsilon")->capture_default_str();
  cmd->add_option("--epochs", c.max_epochs, "Maximum epochs")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--patience", c.patience, "Epochs without validation gain before stopping (0: never)")
      ->capture_default_str();
}

void add_model_commands(CLI::App& app, std::uint64_t& seed) {
  auto tr = std::make_shared<TrainOptions>();
  auto* t = app.add_subcommand("train", "Train the matching model and save the best checkpoint");
  add_run_options(t, tr->run);
  t->add_option("--out", tr->out, "Checkpoint of the best validation epoch")->required();
  t->add_option("--final-out", tr->final_out, "Checkpoint of the last epoch");
  t->add_option("--history", tr->history, "Per-epoch history CSV");
  t->add_option("--summary", tr->summary, "Training summary JSON");
  t->callback([tr, &seed] {
    ModelRun& r = tr->run;
    Dataset d = load_dataset(r.data, r.encoder.window);
    finish_encoder(r, d.vocab);
    r.train.seed = shuffle_seed(seed);
    const model::Model m(r.encoder);
    trainer::TrainResult res =
        trainer::train(m, m.init_params(init_seed(seed)), d.parts.train, d.parts.validation, r.train);
    model::save_checkpoint(tr->out, r.encoder, res.best_params);
    if (!tr->final_out.empty()) model::save_checkpoint(tr->final_out, r.encoder, res.final_params);
    if (!tr->history.empty()) trainer::write_history_csv(tr->history, res.history);
    const auto& best = res.history.at(res.best_epoch - 1);
    nlohmann::json summary = {
        {"best_epoch", res.best_epoch},
        {"epochs_run", res.history.size()},
        {"steps", res.steps},
        {"train_instances", d.parts.train.size()},
        {"validation_instances", d.parts.validation.size()},
        {"val_auc_retrieval", number_or_null(best.val_auc_retrieval)},
        {"val_auc_prerank", number_or_null(best.val_auc_prerank)},
    };
    if (!tr->summary.empty()) write_json(tr->summary, summary);
    std::cout << summary.dump(2) << '\n';
  });

  auto ev = std::make_shared<EvalOptions>();
  auto* e = app.add_subcommand("eval", "Score a checkpoint on one split: AUC and prediction statistics per task");
  add_data_options(e, ev->data);
  e->add_option("--checkpoint", ev->checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  e->add_option("--split", ev->split, "Which split to score")
      ->check(CLI::IsMember({"train", "validation", "test"}))
      ->capture_default_str();
  e->add_option("--out", ev->out, "Metrics JSON");
  e->callback([ev] {
    model::Checkpoint ck = model::load_checkpoint(ev->checkpoint);
    Dataset d = load_dataset(ev->data, ck.config.window);
    if (ck.config.vocab_sizes != d.vocab.sizes()) {
      throw VocabularyError("checkpoint vocabulary sizes differ from " + ev->data.vocab);
    }
    const auto& set = ev->split == "train" ? d.parts.train
                      : ev->split == "validation" ? d.parts.validation
                                                  : d.parts.test;
    if (set.empty()) throw EmptyCorpusError("the " + ev->split + " split is empty");
    const model::Model m(ck.config);
    const model::Predictions p = m.predict(ck.params, set);
    std::vector<double> y;
    for (const auto& inst : set) y.push_back(inst.label);
    auto task = [&](std::span<const double> scores) {
      const auto s = evaluator::prediction_stats(scores);
      return nlohmann::json{{"auc", number_or_null(safe_auc(scores, y))},
                            {"mean", s.mean}, {"variance", s.variance}, {"min", s.min}, {"max", s.max}};
    };
    nlohmann::json out = {{"split", ev->split},
                          {"instances", set.size()},
                          {"retrieval", task(p.retrieval)},
                          {"prerank", task(p.prerank)}};
    if (!ev->out.empty()) write_json(ev->out, out);
    std::cout << out.dump(2) << '\n';
  });

  auto sw = std::make_shared<SweepOptions>();
  auto* s = app.add_subcommand("gamma-sweep", "Train one model per gamma and report prediction statistics");
  add_run_options(s, sw->run);
  s->add_option("--gammas", sw->gammas, "Gamma values")->delimiter(',');
  s->add_option("--out-csv", sw->out_csv, "CSV report");
  s->callback([sw, &seed] {
    ModelRun& r = sw->run;
    Dataset d = load_dataset(r.data, r.encoder.window);
    finish_encoder(r, d.vocab);
    r.train.seed = shuffle_seed(seed);
    const evaluator::ExperimentData data{d.parts.train, d.parts.validation, d.parts.test};
    const auto rows = evaluator::gamma_sweep(data, sw->gammas, r.encoder, r.train, init_seed(seed));
    if (!sw->out_csv.empty()) evaluator::write_gamma_csv(sw->out_csv, rows);
    std::cout << evaluator::gamma_table(rows);
  });

  auto ab = std::make_shared<AblationOptions>();
  auto* a = app.add_subcommand("ablation", "Compare encoders, joint vs single training, and shared vs separate towers");
  add_run_options(a, ab->run);
  a->add_option("--out-csv", ab->out_csv, "CSV report");
  a->callback([ab, &seed] {
    ModelRun& r = ab->run;
    Dataset d = load_dataset(r.data, r.encoder.window);
    finish_encoder(r, d.vocab);
    r.train.seed = shuffle_seed(seed);
    const evaluator::ExperimentData data{d.parts.train, d.parts.validation, d.parts.test};
    const auto rep = evaluator::ablation_suite(data, r.encoder, r.train, init_seed(seed));
    if (!ab->out_csv.empty()) evaluator::write_ablation_csv(ab->out_csv, rep);
    std::cout << evaluator::ablation_table(rep);
  });
}

}  // namespace admatch::cli
