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

#include <benchmark/benchmark.h>

#include <vector>

#include "admatch/dataio/instances.hpp"
#include "admatch/dataio/synthetic.hpp"
#include "admatch/dataio/vocabulary.hpp"
#include "admatch/model/heads.hpp"
#include "admatch/model/model.hpp"

namespace {

using namespace admatch;

struct Fixture {
  model::EncoderConfig config;
  std::vector<model::ImpressionInstance> instances;
  numkit::ParamStore params;

  Fixture() {
    dataio::SyntheticConfig sc;
    sc.n_users = 100;
    sc.days = 1;
    const auto corpus = dataio::generate_synthetic(sc);
    const auto vocab = dataio::build_vocab(corpus.records, dataio::TopK::uniform(dataio::kUnlimitedTopK));
    instances = dataio::make_instances(corpus.records, vocab, config.window);
    config.vocab_sizes = vocab.sizes();
    params = model::Model(config).init_params(1);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_QuForward(benchmark::State& state) {
  const auto& f = fixture();
  model::EncoderConfig c = f.config;
  c.variant = model::kAllVariants[static_cast<std::size_t>(state.range(0))];
  const model::Model m(c);
  const auto params = m.init_params(1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.qu_vector(params, f.instances[i++ % f.instances.size()].request));
  }
  state.SetLabel(std::string(model::variant_name(c.variant)));
}
BENCHMARK(BM_QuForward)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  const auto& f = fixture();
  const model::Model m(f.config);
  std::vector<const model::ImpressionInstance*> batch;
  for (std::size_t i = 0; i < 128 && i < f.instances.size(); ++i) batch.push_back(&f.instances[i]);
  for (auto _ : state) {
    numkit::Tape tape(f.params);
    auto loss = m.loss(tape, batch, model::LossKind::kJoint);
    tape.backward(loss);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

// Scoring N candidates for one request: split reuses the query part.
void BM_PrerankSplit(benchmark::State& state) {
  const auto& f = fixture();
  const model::Model m(f.config);
  const auto head = m.prerank_head(f.params);
  const auto v_qu = m.qu_vector(f.params, f.instances[0].request);
  std::vector<std::vector<double>> v_a, parts;
  for (std::size_t i = 0; i < 200; ++i) {
    v_a.push_back(m.ad_vector(f.params, f.instances[i % f.instances.size()].ad));
    parts.push_back(model::ad_part(v_a.back(), head.weight));
  }
  for (auto _ : state) {
    const auto q = model::query_part(v_qu, head.weight, head.bias);
    double s = 0.0;
    for (const auto& p : parts) s += model::prerank_prob_split(head, q, p);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_PrerankSplit)->Unit(benchmark::kMicrosecond);

void BM_PrerankDirect(benchmark::State& state) {
  const auto& f = fixture();
  const model::Model m(f.config);
  const auto head = m.prerank_head(f.params);
  const auto v_qu = m.qu_vector(f.params, f.instances[0].request);
  std::vector<std::vector<double>> v_a;
  for (std::size_t i = 0; i < 200; ++i) v_a.push_back(m.ad_vector(f.params, f.instances[i % f.instances.size()].ad));
  for (auto _ : state) {
    double s = 0.0;
    for (const auto& a : v_a) s += model::prerank_prob_direct(head, v_qu, a);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_PrerankDirect)->Unit(benchmark::kMicrosecond);

}  // namespace
