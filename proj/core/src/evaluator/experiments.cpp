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

#include "admatch/evaluator/experiments.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/model/model.hpp"

namespace admatch::evaluator {
namespace {

using trainer::TrainMode;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

TaskScores score(std::span<const double> predictions, std::span<const double> labels) {
  TaskScores s;
  try {
    s.auc = auc(predictions, labels);
  } catch (const UndefinedAucError&) {
    s.auc = kNan;
  }
  s.stats = prediction_stats(predictions);
  return s;
}

double task_auc(const std::optional<TaskScores>& t) { return t ? t->auc : kNan; }

std::string fmt_auc(const std::optional<TaskScores>& t) {
  return t ? fmt::format("{:.4f}", t->auc) : std::string("-");
}

void add_check(std::vector<OrderingCheck>& out, std::string claim, double lhs, double rhs,
               bool allow_equal) {
  const bool holds = allow_equal ? lhs >= rhs : lhs > rhs;
  out.push_back({std::move(claim), lhs, rhs, holds});
}

const CellResult& find(const std::vector<CellResult>& cells, model::EncoderVariant v) {
  for (const auto& c : cells) {
    if (c.encoder.variant == v) return c;
  }
  throw ConfigError("missing ablation cell");
}

}  // namespace

CellResult run_cell(const std::string& label, const model::EncoderConfig& encoder,
                    const trainer::TrainConfig& train, std::uint64_t init_seed,
                    const ExperimentData& data) {
  log::info("experiment cell: " + label);
  const model::Model m(encoder);
  trainer::TrainResult r =
      trainer::train(m, m.init_params(init_seed), data.train, data.validation, train);
  const model::Predictions pred = m.predict(r.best_params, data.test);
  std::vector<double> labels;
  labels.reserve(data.test.size());
  for (const auto& inst : data.test) labels.push_back(inst.label);

  CellResult cell;
  cell.label = label;
  cell.encoder = encoder;
  cell.mode = train.mode;
  cell.best_epoch = r.best_epoch;
  if (!data.test.empty()) {
    if (train.mode != TrainMode::kSinglePrerank) cell.retrieval = score(pred.retrieval, labels);
    if (train.mode != TrainMode::kSingleRetrieval) cell.prerank = score(pred.prerank, labels);
  }
  return cell;
}

std::vector<GammaRow> gamma_sweep(const ExperimentData& data, std::span<const double> gammas,
                                  const model::EncoderConfig& encoder,
                                  const trainer::TrainConfig& train, std::uint64_t init_seed) {
  for (double g : gammas) {
    if (!(g > 0.0)) throw ConfigError(fmt::format("gamma must be positive, got {}", g));
  }
  std::vector<GammaRow> rows;
  for (double g : gammas) {
    model::EncoderConfig enc = encoder;
    enc.gamma = g;
    const CellResult cell = run_cell(fmt::format("gamma={}", g), enc, train, init_seed, data);
    GammaRow row;
    row.gamma = g;
    if (cell.retrieval) {
      row.retrieval = *cell.retrieval;
    } else {
      row.retrieval.auc = kNan;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string gamma_table(std::span<const GammaRow> rows) {
  std::string out = fmt::format("{:>8}  {:<40}  {}\n", "gamma", "(mean, var, [min, max]) of P", "AUC");
  for (const auto& r : rows) {
    out += fmt::format("{:>8g}  {:<40}  {:.4f}\n", r.gamma, format_stats(r.retrieval.stats),
                       r.retrieval.auc);
  }
  out += "var is the population variance.\n";
  return out;
}

void write_gamma_csv(const std::filesystem::path& path, std::span<const GammaRow> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << "gamma,mean,variance,min,max,auc\n";
  for (const auto& r : rows) {
    const auto& s = r.retrieval.stats;
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.gamma, s.mean,
                       s.variance, s.min, s.max, r.retrieval.auc);
  }
}

AblationReport ablation_suite(const ExperimentData& data, const model::EncoderConfig& encoder,
                              const trainer::TrainConfig& train, std::uint64_t init_seed) {
  using model::EncoderVariant;
  AblationReport rep;
  trainer::TrainConfig joint = train;
  joint.mode = TrainMode::kJoint;
  model::EncoderConfig shared = encoder;
  shared.share_tower = true;

  for (EncoderVariant v : model::kAllVariants) {
    model::EncoderConfig enc = shared;
    enc.variant = v;
    rep.variants.push_back(run_cell(std::string(model::variant_name(v)), enc, joint, init_seed, data));
  }

  model::EncoderConfig agru = shared;
  agru.variant = EncoderVariant::kAttentionGruRnn;
  rep.training.push_back(find(rep.variants, EncoderVariant::kAttentionGruRnn));
  rep.training.back().label = "jointly training";
  for (auto [mode, label] : {std::pair{TrainMode::kSingleRetrieval, "single training task1"},
                             std::pair{TrainMode::kSinglePrerank, "single training task2"}}) {
    trainer::TrainConfig t = train;
    t.mode = mode;
    rep.training.push_back(run_cell(label, agru, t, init_seed, data));
  }

  rep.sharing.push_back(rep.training.front());
  rep.sharing.back().label = "share";
  model::EncoderConfig split = agru;
  split.share_tower = false;
  rep.sharing.push_back(run_cell("non-share", split, joint, init_seed, data));

  const CellResult& dnn = find(rep.variants, EncoderVariant::kDnn);
  const CellResult& gru = find(rep.variants, EncoderVariant::kGruRnn);
  const CellResult& adnn = find(rep.variants, EncoderVariant::kAttentionDnn);
  const CellResult& agru_cell = find(rep.variants, EncoderVariant::kAttentionGruRnn);
  for (int task : {1, 2}) {
    auto a = [task](const CellResult& c) { return task_auc(task == 1 ? c.retrieval : c.prerank); };
    const std::string t = fmt::format(" (task {})", task);
    add_check(rep.orderings, "ATTENTION_GRU_RNN > GRU_RNN" + t, a(agru_cell), a(gru), false);
    add_check(rep.orderings, "ATTENTION_DNN > DNN" + t, a(adnn), a(dnn), false);
    add_check(rep.orderings, "GRU_RNN > DNN" + t, a(gru), a(dnn), false);
    add_check(rep.orderings, "ATTENTION_GRU_RNN > ATTENTION_DNN" + t, a(agru_cell), a(adnn), false);
    add_check(rep.orderings, "joint >= single" + t, a(rep.training[0]), a(rep.training[task]), true);
    add_check(rep.orderings, "share >= non-share" + t, a(rep.sharing[0]), a(rep.sharing[1]), true);
  }
  return rep;
}

std::string ablation_table(const AblationReport& rep) {
  std::string out;
  auto section = [&](const char* title, const std::vector<CellResult>& cells) {
    out += fmt::format("{}\n{:<26} {:>10} {:>10}\n", title, "", "Task1 AUC", "Task2 AUC");
    for (const auto& c : cells) {
      out += fmt::format("{:<26} {:>10} {:>10}\n", c.label, fmt_auc(c.retrieval), fmt_auc(c.prerank));
    }
    out += "\n";
  };
  section("Encoders (joint, shared layers)", rep.variants);
  section("Joint vs single training (ATTENTION_GRU_RNN)", rep.training);
  section("Share vs non-share layers (ATTENTION_GRU_RNN)", rep.sharing);
  out += "Orderings\n";
  for (const auto& o : rep.orderings) {
    out += fmt::format("  [{}] {}: {:.4f} vs {:.4f}\n", o.holds ? "holds" : "fails", o.claim, o.lhs, o.rhs);
  }
  return out;
}

void write_ablation_csv(const std::filesystem::path& path, const AblationReport& rep) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << "group,label,variant,mode,share_tower,task1_auc,task2_auc,best_epoch\n";
  auto rows = [&](const char* group, const std::vector<CellResult>& cells) {
    for (const auto& c : cells) {
      out << fmt::format("{},{},{},{},{},{:.17g},{:.17g},{}\n", group, c.label,
                         model::variant_name(c.encoder.variant), trainer::mode_name(c.mode),
                         c.encoder.share_tower ? 1 : 0, task_auc(c.retrieval), task_auc(c.prerank),
                         c.best_epoch);
    }
  };
  rows("encoder", rep.variants);
  rows("training", rep.training);
  rows("sharing", rep.sharing);
}

}  // namespace admatch::evaluator
