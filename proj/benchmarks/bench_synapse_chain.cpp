#include <benchmark/benchmark.h>

#include <random>

#include "spinrf/frequency_grid.hpp"
#include "spinrf/synapse_chain.hpp"

using namespace spinrf;

namespace {

// chains x inputs, one resonator per input (the default layout)
ChainLayerState layer(const std::vector<double>& freqs, std::size_t chains) {
  std::mt19937_64 rng(1);
  ChainInit init;
  init.n_chains = chains;
  return make_chain_layer(freqs, init, rng);
}

void BM_EffectiveWeights(benchmark::State& st) {
  const auto n_in = static_cast<std::size_t>(st.range(0));
  const auto chains = static_cast<std::size_t>(st.range(1));
  const auto freqs = equidistant(20e6, 120e6, n_in);
  const auto s = layer(freqs, chains);
  for (auto _ : st) benchmark::DoNotOptimize(effective_weights(s, freqs));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n_in * n_in * chains));
}
BENCHMARK(BM_EffectiveWeights)->Args({256, 128})->Args({784, 10})->Args({2, 2});

void BM_ChainBackward(benchmark::State& st) {
  const auto freqs = equidistant(20e6, 120e6, 256);
  const auto s = layer(freqs, 128);
  Matrix p(32, 256, 0.5), g(32, 128, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(backward(s, freqs, p, g));
}
BENCHMARK(BM_ChainBackward);

}  // namespace
