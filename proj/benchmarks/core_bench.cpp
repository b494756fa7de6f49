/* Copyright 2026 The vsent Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <random>

#include <benchmark/benchmark.h>

#include "vsent/annotation.hpp"
#include "vsent/backbone.hpp"
#include "vsent/digest.hpp"
#include "vsent/model.hpp"
#include "vsent/synthetic.hpp"

namespace {

using namespace vsent;

void BM_HeadLossAndGradient(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto head = SigmoidHead::random(dim, 7, 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(static_cast<Eigen::Index>(dim));
  const std::vector<std::uint8_t> y{1, 0, 1, 0, 0, 1, 0};
  auto grad = HeadGradient::zeros_like(head);
  for (auto _ : state) benchmark::DoNotOptimize(head_loss_and_gradient(head, x, y, &grad));
}
BENCHMARK(BM_HeadLossAndGradient)->Arg(32)->Arg(4096)->Arg(8192);

void BM_Cooccurrence(benchmark::State& state) {
  const auto vocab = TagVocabulary::disaster_default();
  std::mt19937_64 rng(3);
  std::bernoulli_distribution pick(0.3);
  std::vector<AnnotationResponse> responses(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < responses.size(); ++i) {
    responses[i].participant_id = "p" + std::to_string(i);
    responses[i].image_id = "img-" + std::to_string(i % 400);
    for (const auto& t : vocab.tags())
      if (pick(rng)) responses[i].selected_tags.insert(t);
  }
  for (auto _ : state) benchmark::DoNotOptimize(cooccurrence(responses, vocab));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Cooccurrence)->Arg(2587);

void BM_ToyExtract(benchmark::State& state) {
  BackboneSpec spec;
  spec.name = "toy";
  spec.domain = state.range(0) ? PretrainDomain::scene : PretrainDomain::object;
  spec.feature_dim = 16;
  spec.input_size = 32;
  const ToyConvBackbone backbone(spec, 1);
  SyntheticOptions opt;
  opt.count = 4;
  const auto scenes = make_synthetic_scenes(opt);
  for (auto _ : state) benchmark::DoNotOptimize(backbone.extract(scenes[0].image));
}
BENCHMARK(BM_ToyExtract)->Arg(0)->Arg(1);

void BM_Sha256(benchmark::State& state) {
  const std::string bytes(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(sha256_hex(bytes));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(1 << 16)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
