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
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "admatch/annindex/ann_index.hpp"
#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "admatch/model/checkpoint.hpp"
#include "admatch/pipeline/offline.hpp"
#include "admatch/pipeline/simulator.hpp"
#include "commands.hpp"

namespace admatch::cli {
namespace {

using annindex::AdId;

struct LoadedModel {
  model::Checkpoint checkpoint;
  dataio::Vocabulary vocab;
  std::optional<model::Model> model;
};

void load_model(LoadedModel& m, const std::string& checkpoint, const std::string& vocab) {
  m.checkpoint = model::load_checkpoint(checkpoint);
  m.vocab = dataio::Vocabulary::load_tsv(vocab);
  if (m.checkpoint.config.vocab_sizes != m.vocab.sizes()) {
    throw VocabularyError("checkpoint vocabulary sizes differ from " + vocab);
  }
  m.model.emplace(m.checkpoint.config);
}

std::vector<pipeline::AdVector> read_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<pipeline::AdVector> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("ad_id").get<AdId>(), j.at("vector").get<std::vector<double>>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return out;
}

void write_vectors(const std::string& path, std::span<const pipeline::AdVector> vectors) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  for (const auto& v : vectors) {
    out << nlohmann::json{{"ad_id", v.ad_id}, {"vector", v.vector}}.dump() << '\n';
  }
}

void add_vectors(annindex::AnnIndex& index, std::span<const pipeline::AdVector> vectors) {
  std::vector<AdId> ids;
  std::vector<double> flat;
  for (const auto& v : vectors) {
    if (v.vector.size() != index.dim()) {
      throw DimensionError(fmt::format("ad {} has {} dims, index has {}", v.ad_id, v.vector.size(), index.dim()));
    }
    ids.push_back(v.ad_id);
    flat.insert(flat.end(), v.vector.begin(), v.vector.end());
  }
  index.add_ads(ids, flat);
}

struct ExportOptions {
  std::string checkpoint, vocab, ads, out;
};

struct BuildIndexOptions {
  std::string vectors, out;
  annindex::PqConfig pq;
  bool no_pq = false;
};

struct AddOptions {
  std::string index, out, vectors;
  AdId ad_id = 0;
  std::vector<double> vector;
};

struct SearchOptions {
  std::string index;
  std::vector<double> vector;
  std::optional<AdId> like;
  std::size_t k = 10;
  std::size_t overfetch = 10;
  bool exact = false;
  bool no_rerank = false;
};

struct RebuildOptions {
  std::string index, out;
};

struct SimulateOptions {
  DataOptions data;
  std::string checkpoint, ads, index, ad_parts, impressions, metrics;
  std::string split = "test";
  std::vector<std::string> paths = {"keyword", "vector"};
  pipeline::EngineConfig engine;
  pipeline::SimConfig sim;
};

}  // namespace

void add_serving_commands(CLI::App& app, std::uint64_t& seed) {
  auto ex = std::make_shared<ExportOptions>();
  auto* e = app.add_subcommand("export-vectors", "Run Ad-Net over the catalog and write unit ad vectors (JSON Lines)");
  e->add_option("--checkpoint", ex->checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  e->add_option("--vocab", ex->vocab, "Vocabulary TSV")->required()->check(CLI::ExistingFile);
  e->add_option("--ads", ex->ads, "Ad catalog (JSON Lines)")->required()->check(CLI::ExistingFile);
  e->add_option("--out", ex->out, "Output vectors (JSON Lines)")->required();
  e->callback([ex] {
    LoadedModel m;
    load_model(m, ex->checkpoint, ex->vocab);
    const auto ads = dataio::read_ads(ex->ads);
    const auto vectors = pipeline::export_ad_vectors(*m.model, m.checkpoint.params, ads, m.vocab);
    write_vectors(ex->out, vectors);
    log::info(fmt::format("exported {} ad vectors", vectors.size()));
  });

  auto bi = std::make_shared<BuildIndexOptions>();
  auto* b = app.add_subcommand("build-index", "Build the vector index and train product-quantization codebooks");
  b->add_option("--vectors", bi->vectors, "Ad vectors (JSON Lines)")->required()->check(CLI::ExistingFile);
  b->add_option("--out", bi->out, "Index file")->required();
  b->add_option("--m", bi->pq.subquantizers, "Subspaces M")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--k", bi->pq.centroids, "Centroids per subspace (at most 256)")
      ->capture_default_str()
      ->check(CLI::Range(1, 256));
  b->add_option("--iterations", bi->pq.iterations, "Lloyd iterations")->capture_default_str();
  b->add_flag("--no-pq", bi->no_pq, "Store vectors only; searches run exactly");
  b->callback([bi, &seed] {
    const auto vectors = read_vectors(bi->vectors);
    if (vectors.empty()) throw EmptyCorpusError("no vectors in " + bi->vectors);
    bi->pq.seed = seed;
    annindex::AnnIndex index(vectors.front().vector.size(), bi->pq);
    add_vectors(index, vectors);
    if (!bi->no_pq) index.train_pq();
    index.save(bi->out);
    log::info(fmt::format("indexed {} ads, dim {}, pq {}", index.size(), index.dim(), index.has_pq()));
  });

  auto ad = std::make_shared<AddOptions>();
  auto* a = app.add_subcommand("add-ad", "Add or replace ads in an index without retraining codebooks");
  a->alias("add");
  a->add_option("--index", ad->index, "Index file")->required()->check(CLI::ExistingFile);
  a->add_option("--out", ad->out, "Output index (default: overwrite --index)");
  auto* id_opt = a->add_option("--ad-id", ad->ad_id, "Ad id for --vector");
  auto* vec_opt = a->add_option("--vector", ad->vector, "Comma-separated vector")->delimiter(',');
  auto* file_opt = a->add_option("--vectors", ad->vectors, "Ad vectors (JSON Lines)")->check(CLI::ExistingFile);
  vec_opt->needs(id_opt);
  id_opt->needs(vec_opt);
  vec_opt->excludes(file_opt);
  a->callback([ad] {
    annindex::AnnIndex index = annindex::AnnIndex::load(ad->index);
    if (!ad->vectors.empty()) {
      add_vectors(index, read_vectors(ad->vectors));
    } else if (!ad->vector.empty()) {
      index.add_ad(ad->ad_id, ad->vector);
    } else {
      throw CLI::RequiredError("--vector or --vectors");
    }
    index.save(ad->out.empty() ? ad->index : ad->out);
    log::info(fmt::format("index now holds {} ads", index.size()));
  });

  auto se = std::make_shared<SearchOptions>();
  auto* s = app.add_subcommand("search", "Top-k cosine search; prints JSON Lines hits");
  s->add_option("--index", se->index, "Index file")->required()->check(CLI::ExistingFile);
  auto* q_opt = s->add_option("--vector", se->vector, "Comma-separated query vector")->delimiter(',');
  auto* like_opt = s->add_option("--like-ad", se->like, "Use a stored ad's vector as the query");
  q_opt->excludes(like_opt);
  s->add_option("--k", se->k, "Hits")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--overfetch", se->overfetch, "Candidates re-scored per hit")->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->add_flag("--exact", se->exact, "Exhaustive exact search");
  s->add_flag("--no-rerank", se->no_rerank, "Return quantized scores without exact re-rank");
  s->callback([se] {
    const annindex::AnnIndex index = annindex::AnnIndex::load(se->index);
    std::vector<double> q = se->like ? index.vector_of(*se->like) : se->vector;
    if (q.empty()) throw CLI::RequiredError("--vector or --like-ad");
    if (q.size() != index.dim()) {
      throw DimensionError(fmt::format("query has {} dims, index has {}", q.size(), index.dim()));
    }
    double norm = 0.0;
    for (double x : q) norm += x * x;
    if (norm == 0.0) throw DegenerateVectorError("zero query vector");
    norm = std::sqrt(norm);
    for (double& x : q) x /= norm;
    const auto hits = se->exact ? index.exact_topk(q, se->k)
                                : index.pq_search(q, se->k, se->overfetch, !se->no_rerank);
    for (const auto& h : hits) {
      std::cout << nlohmann::json{{"ad_id", h.ad_id}, {"score", h.score}}.dump() << '\n';
    }
  });

  auto rb = std::make_shared<RebuildOptions>();
  auto* r = app.add_subcommand("rebuild", "Retrain codebooks on every stored vector and re-encode");
  r->add_option("--index", rb->index, "Index file")->required()->check(CLI::ExistingFile);
  r->add_option("--out", rb->out, "Output index (default: overwrite --index)");
  r->callback([rb] {
    annindex::AnnIndex index = annindex::AnnIndex::load(rb->index);
    index.rebuild();
    index.save(rb->out.empty() ? rb->index : rb->out);
  });

  auto pc = std::make_shared<ExportOptions>();
  auto* p = app.add_subcommand("precompute-ad-parts", "Precompute the ad-side first-layer products of the pre-rank head");
  p->add_option("--checkpoint", pc->checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  p->add_option("--vocab", pc->vocab, "Vocabulary TSV")->required()->check(CLI::ExistingFile);
  p->add_option("--ads", pc->ads, "Ad catalog (JSON Lines)")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pc->out, "Output table")->required();
  p->callback([pc] {
    LoadedModel m;
    load_model(m, pc->checkpoint, pc->vocab);
    const auto ads = dataio::read_ads(pc->ads);
    const auto table = pipeline::precompute_ad_parts(*m.model, m.checkpoint.params, ads, m.vocab);
    table.save(pc->out);
    log::info(fmt::format("precomputed {} ad parts of width {}", table.size(), table.width()));
  });

  auto si = std::make_shared<SimulateOptions>();
  auto* sim = app.add_subcommand("simulate", "Replay logged requests through retrieval and pre-ranking with simulated clicks");
  add_data_options(sim, si->data);
  sim->add_option("--checkpoint", si->checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  sim->add_option("--ads", si->ads, "Ad catalog (JSON Lines)")->required()->check(CLI::ExistingFile);
  sim->add_option("--index", si->index, "Vector index (required with the vector path)")->check(CLI::ExistingFile);
  sim->add_option("--ad-parts", si->ad_parts, "Precomputed ad parts (default: computed per ad)")
      ->check(CLI::ExistingFile);
  sim->add_option("--split", si->split, "Which requests to replay")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}))
      ->capture_default_str();
  sim->add_option("--paths", si->paths, "Retrieval paths")
      ->delimiter(',')
      ->check(CLI::IsMember({"keyword", "vector"}))
      ->capture_default_str();
  sim->add_option("--top-n", si->engine.top_n, "Candidates kept after pre-ranking")->capture_default_str();
  sim->add_option("--k-vector", si->engine.k_vector, "Vector-path hits")->capture_default_str();
  sim->add_option("--overfetch", si->engine.overfetch, "Vector-path re-rank factor")->capture_default_str();
  sim->add_option("--present-slots", si->sim.present_slots, "Ads shown per request")->capture_default_str();
  sim->add_option("--p-hi", si->sim.p_hi, "Click rate on intent match")->capture_default_str();
  sim->add_option("--p-lo", si->sim.p_lo, "Click rate otherwise")->capture_default_str();
  sim->add_flag("--verify-split", si->engine.verify_split, "Also score directly and report the largest gap");
  sim->add_option("--impressions", si->impressions, "Impression log (JSON Lines)");
  sim->add_option("--metrics", si->metrics, "Metrics summary (JSON)");
  sim->callback([si, &seed] {
    LoadedModel m;
    load_model(m, si->checkpoint, si->data.vocab);
    si->engine.keyword_path = std::find(si->paths.begin(), si->paths.end(), "keyword") != si->paths.end();
    si->engine.vector_path = std::find(si->paths.begin(), si->paths.end(), "vector") != si->paths.end();
    if (si->engine.vector_path && si->index.empty()) throw CLI::RequiredError("--index (vector path)");
    Dataset d = load_dataset(si->data, m.checkpoint.config.window);
    const auto ads = dataio::read_ads(si->ads);
    const pipeline::AdCatalog catalog = pipeline::make_catalog(ads, d.vocab);
    const pipeline::BidwordIndex bidwords = pipeline::BidwordIndex::build(ads);
    std::optional<annindex::AnnIndex> ann;
    if (si->engine.vector_path) ann.emplace(annindex::AnnIndex::load(si->index));
    std::optional<pipeline::AdPartsTable> parts;
    if (!si->ad_parts.empty()) parts.emplace(pipeline::AdPartsTable::load(si->ad_parts));
    const pipeline::MatchingEngine engine(*m.model, m.checkpoint.params, bidwords, ann ? &*ann : nullptr,
                                          parts ? &*parts : nullptr, catalog, si->engine);
    const auto& set = si->split == "train"        ? d.parts.train
                      : si->split == "validation" ? d.parts.validation
                      : si->split == "test"       ? d.parts.test
                                                  : d.instances;
    const auto requests = pipeline::distinct_requests(set);
    si->sim.seed = seed;
    const pipeline::SimResult res = pipeline::simulate(engine, requests, catalog, si->sim);
    const nlohmann::json summary = pipeline::metrics_json(res, si->engine);
    if (!si->impressions.empty()) pipeline::write_impressions_jsonl(si->impressions, res.impressions);
    if (!si->metrics.empty()) {
      std::ofstream out(si->metrics, std::ios::trunc | std::ios::binary);
      if (!out) throw FormatError("cannot open for writing: " + si->metrics);
      out << summary.dump(2) << '\n';
    }
    std::cout << summary.dump(2) << '\n';
  });
}

}  // namespace admatch::cli
