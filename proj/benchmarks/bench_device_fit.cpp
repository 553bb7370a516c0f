#include <benchmark/benchmark.h>

#include <cmath>

#include "spinrf/device_fit.hpp"
#include "spinrf/energy.hpp"
#include "spinrf/frequency_grid.hpp"

using namespace spinrf;

namespace {

void BM_FitSpinDiode(benchmark::State& st) {
  SpinDiodeFit truth;
  truth.resonances = {{0.8e9, 8e6, 300.0, 1.7e4}, {1.1e9, 11e6, -200.0, -1.7e4}};
  const auto f = equidistant(0.5e9, 1.5e9, 401);
  std::vector<double> v;
  for (double x : f) v.push_back(spin_diode_model(truth, x));
  for (auto _ : st) benchmark::DoNotOptimize(fit_spin_diode(f, v, 2));
}
BENCHMARK(BM_FitSpinDiode)->Unit(benchmark::kMicrosecond);

void BM_FitPiecewiseNeuron(benchmark::State& st) {
  std::vector<double> i, v;
  for (int k = 0; k <= 600; ++k) {
    i.push_back(1e-5 * k);
    v.push_back(i.back() < 3e-3 ? 0.0 : 2e3 * i.back() - 4.0);
  }
  for (auto _ : st) benchmark::DoNotOptimize(fit_piecewise_neuron(i, v));
}
BENCHMARK(BM_FitPiecewiseNeuron)->Unit(benchmark::kMicrosecond);

void BM_EnergyBudget(benchmark::State& st) {
  const EnergyConfig cfg;
  const std::vector<std::size_t> sizes = {256, 128, 10};
  for (auto _ : st) benchmark::DoNotOptimize(network_budget(sizes, cfg));
}
BENCHMARK(BM_EnergyBudget);

}  // namespace
