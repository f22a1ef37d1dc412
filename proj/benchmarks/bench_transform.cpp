#include <benchmark/benchmark.h>

#include <random>

#include "evocalc/fourier_laplace.hpp"
#include "evocalc/material_law.hpp"

namespace {

using namespace evocalc;

WeightedSignal noise(std::size_t n, std::size_t channels) {
  const TimeGrid g(0.0, 10.0 / static_cast<double>(n), n, 2.2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<Complex> s(n * channels);
  for (auto& z : s) z = {nd(rng), nd(rng)};
  return WeightedSignal(g, channels, std::move(s));
}

void BM_ForwardInverse(benchmark::State& state) {
  const auto f = noise(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    auto back = inverse(forward(f));
    benchmark::DoNotOptimize(back.samples().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_ForwardInverse)->Args({1024, 1})->Args({4096, 1})->Args({4096, 201})->Args({32768, 1});

void BM_ApplyDelay(benchmark::State& state) {
  const auto f = noise(static_cast<std::size_t>(state.range(0)), 1);
  const OperatorFunction d = delay_function(-0.25, 1);
  for (auto _ : state) {
    auto out = apply_function(d, f);
    benchmark::DoNotOptimize(out.samples().data());
  }
}
BENCHMARK(BM_ApplyDelay)->Arg(4096)->Arg(32768);

}  // namespace
