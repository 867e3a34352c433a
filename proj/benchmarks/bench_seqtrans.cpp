// Copyright 2026 The seqtrans Authors
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

#include "seqtrans/seqtrans.hpp"

using namespace seqtrans;

namespace {

Vector random_probs(long n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  Vector p(n);
  for (auto& e : p) e = u(rng);
  return p;
}

std::vector<Vector> random_inputs(long dim, std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> x(steps, Vector(dim));
  for (auto& f : x)
    for (auto& e : f) e = g(rng);
  return x;
}

BinaryVector random_bits(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution b(0.3);
  BinaryVector v(n);
  for (auto& e : v) e = b(rng) ? 1 : 0;
  return v;
}

void BM_EnumerateFirstK(benchmark::State& state) {
  const auto p = random_probs(state.range(0), 1);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_independent(p, k));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_EnumerateFirstK)->Args({12, 10})->Args({88, 10})->Args({88, 100})->Args({88, 1000});

void BM_NadeLogLikelihood(benchmark::State& state) {
  const long n = state.range(0), h = state.range(1);
  Rng rng(2);
  const auto p = EstimatorParams::random_init(n, h, rng);
  const auto v = random_bits(static_cast<std::size_t>(n), 3);
  for (auto _ : state) benchmark::DoNotOptimize(nade_log_likelihood(p, v));
}
BENCHMARK(BM_NadeLogLikelihood)->Args({12, 16})->Args({88, 100});

void BM_NadeGradient(benchmark::State& state) {
  const long n = state.range(0), h = state.range(1);
  Rng rng(4);
  const auto p = EstimatorParams::random_init(n, h, rng);
  const auto v = random_bits(static_cast<std::size_t>(n), 5);
  for (auto _ : state) benchmark::DoNotOptimize(nade_gradient(p, v));
}
BENCHMARK(BM_NadeGradient)->Args({12, 16})->Args({88, 100});

void BM_SequenceGradient(benchmark::State& state) {
  const TransducerDims d{12, 16, 32, 16};
  Rng rng(6);
  const auto m = TransducerParams::random_init(d, rng);
  const auto steps = static_cast<std::size_t>(state.range(0));
  SequencePair pair{random_inputs(d.input, steps, 7), {}};
  for (std::size_t t = 0; t < steps; ++t) pair.v.push_back(random_bits(12, 8 + t));
  const TrainConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(sequence_gradient(m, pair, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SequenceGradient)->Arg(50);

void BM_BeamSearch(benchmark::State& state) {
  const TransducerDims d{12, 16, 32, 16};
  Rng rng(9);
  const bool independent = state.range(2) != 0;
  const auto m = TransducerParams::random_init(d, rng, independent);
  const auto x = random_inputs(d.input, 50, 10);
  BeamConfig cfg;
  cfg.width = static_cast<std::size_t>(state.range(0));
  cfg.branching = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(beam_search(m, x, cfg));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_BeamSearch)
    ->ArgNames({"w", "K", "indep"})
    ->Args({1, 1, 0})
    ->Args({20, 10, 0})
    ->Args({1, 1, 1})
    ->Args({20, 10, 1})
    ->Unit(benchmark::kMillisecond);

void BM_GreedyDecode(benchmark::State& state) {
  const TransducerDims d{12, 16, 32, 16};
  Rng rng(11);
  const auto m = TransducerParams::random_init(d, rng);
  const auto x = random_inputs(d.input, 50, 12);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_decode(m, x));
}
BENCHMARK(BM_GreedyDecode)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
