#include "spinrf/neuron_layer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinrf/errors.hpp"

namespace spinrf {

namespace {
constexpr double kMicro = 1e-6;
constexpr double kPerMicro = 1e6;
}  // namespace

void NeuronLayerState::validate() const {
  osc.validate();
  if (!(g_m > 0.0) || !std::isfinite(g_m)) throw DomainError("neuron layer: g_m must be positive");
  if (emit_freqs.empty()) throw StructuralError("neuron layer: no neurons");
  std::vector<double> sorted = emit_freqs;
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > 0.0)) throw DomainError("neuron layer: emission frequencies must be > 0");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("neuron layer: emission frequencies must be pairwise distinct");
  }
}

double neuron_output(const NeuronLayerState& state, double voltage_uv) noexcept {
  const double i_dc = voltage_uv * kMicro * state.g_m;
  return stno_power(i_dc, state.osc, state.clamped) * kPerMicro;
}

Matrix forward(const NeuronLayerState& state, const Matrix& voltages) {
  if (voltages.cols() != state.size()) {
    throw StructuralError("neuron layer: got " + std::to_string(voltages.cols()) +
                          " inputs for " + std::to_string(state.size()) + " neurons");
  }
  Matrix out(voltages.rows(), voltages.cols());
  auto src = voltages.flat();
  auto dst = out.flat();
  for (std::size_t n = 0; n < src.size(); ++n) dst[n] = neuron_output(state, src[n]);
  return out;
}

Matrix backward(const NeuronLayerState& state, const Matrix& voltages, const Matrix& upstream) {
  if (voltages.cols() != state.size()) {
    throw StructuralError("neuron layer backward: width mismatch");
  }
  require_shape(upstream, voltages.rows(), voltages.cols(), "neuron layer backward: upstream");
  // P[uW] = 1e6 P(1e-6 V g_m)  =>  dP/dV = g_m dP/dI
  Matrix out(voltages.rows(), voltages.cols());
  auto v = voltages.flat();
  auto up = upstream.flat();
  auto dst = out.flat();
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double i_dc = v[n] * kMicro * state.g_m;
    dst[n] = up[n] * state.g_m * stno_power_grad(i_dc, state.osc, state.clamped);
  }
  return out;
}

}  // namespace spinrf
