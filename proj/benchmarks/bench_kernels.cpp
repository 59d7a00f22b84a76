// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "tsa/mdc_network.hpp"
#include "tsa/ops.hpp"
#include "tsa/proposal.hpp"

namespace {

using tsa::ad::Tensor2D;

std::vector<double> uniform(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// args: channels, T, dilation
void BM_Conv1dForward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto T = static_cast<std::size_t>(state.range(1));
  const auto dilation = static_cast<std::size_t>(state.range(2));
  const Tensor2D x(c, T, uniform(c * T, 1));
  const auto w = uniform(c * c * 3, 2);
  const auto b = uniform(c, 3);
  for (auto _ : state) benchmark::DoNotOptimize(tsa::ad::conv1d_forward(x, w, b, c, 3, dilation));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c * c * 3 * T));
}
BENCHMARK(BM_Conv1dForward)->Args({64, 256, 1})->Args({64, 256, 7})->Args({128, 256, 1})->Args({128, 256, 5});

void BM_DetectorForward(benchmark::State& state) {
  tsa::Detector det(tsa::DetectorConfig::with_width(16, static_cast<std::size_t>(state.range(0))));
  det.initialize(1);
  const Tensor2D x(16, 256, uniform(16 * 256, 4));
  for (auto _ : state) benchmark::DoNotOptimize(tsa::detector_forward(x, det));
}
BENCHMARK(BM_DetectorForward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

std::vector<tsa::Proposal> random_proposals(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<tsa::Proposal> out(n);
  for (auto& p : out) {
    p.start = rng() % 240;
    p.end = p.start + 2 + rng() % 60;
    p.mid = tsa::mid_index(p.start, p.end);
    p.score = u(rng);
  }
  return out;
}

void BM_GreedyNms(benchmark::State& state) {
  const auto props = random_proposals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsa::greedy_nms(props, 0.7));
}
BENCHMARK(BM_GreedyNms)->Arg(100)->Arg(1000)->Arg(4000);

void BM_SoftNms(benchmark::State& state) {
  const auto props = random_proposals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsa::soft_nms(props, 0.5, 0.001));
}
BENCHMARK(BM_SoftNms)->Arg(100)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
