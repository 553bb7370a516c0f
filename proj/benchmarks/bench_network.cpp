#include <benchmark/benchmark.h>

#include "spinrf/network.hpp"

using namespace spinrf;

namespace {

// 256-128-10 drone-sized network, batch 32.
void BM_NetworkForward(benchmark::State& st) {
  const auto m = make_network(NetworkSpec{}, 3);
  const Matrix batch(32, 256, 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(forward(m, batch));
}
BENCHMARK(BM_NetworkForward)->Unit(benchmark::kMillisecond);

void BM_NetworkForwardBackward(benchmark::State& st) {
  const auto m = make_network(NetworkSpec{}, 3);
  const Matrix batch(32, 256, 0.2);
  const Matrix g(32, 10, 1.0);
  for (auto _ : st) {
    const auto tr = forward_trace(m, batch);
    benchmark::DoNotOptimize(backward(m, tr, batch, g));
  }
}
BENCHMARK(BM_NetworkForwardBackward)->Unit(benchmark::kMillisecond);

// Single-layer 784 -> 10 network used for the frequency sweep, batch 100.
void BM_MnistStep(benchmark::State& st) {
  NetworkSpec spec;
  spec.input_grid = FrequencyGrid(50e6, 5e9, 784);
  spec.hidden = 0;
  const auto m = make_network(spec, 3);
  const Matrix batch(100, 784, 0.3);
  const Matrix g(100, 10, 1.0);
  for (auto _ : st) {
    const auto tr = forward_trace(m, batch);
    benchmark::DoNotOptimize(backward(m, tr, batch, g));
  }
}
BENCHMARK(BM_MnistStep)->Unit(benchmark::kMillisecond);

}  // namespace
