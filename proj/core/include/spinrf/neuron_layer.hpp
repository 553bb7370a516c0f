#pragma once

#include <vector>

#include "spinrf/device_models.hpp"
#include "spinrf/matrix.hpp"

namespace spinrf {

// A layer of spin-torque oscillators. Chain voltages (uV) are turned into
// drive currents by a transconductance g_m (A/V); each oscillator emits RF
// power (uW) at its own fixed frequency, so the next synaptic layer sees the
// layer output as a spectrum whose bins are emit_freqs.
struct NeuronLayerState {
  double g_m = 1.81e-3;             // A/V
  std::vector<double> emit_freqs;   // Hz, fixed
  OscillatorParams osc;
  bool clamped = true;

  std::size_t size() const noexcept { return emit_freqs.size(); }
  void validate() const;

  bool operator==(const NeuronLayerState&) const = default;
};

// [B x H] uV -> [B x H] uW.
Matrix forward(const NeuronLayerState& state, const Matrix& voltages);

// dL/dV given dL/dP (both [B x H]).
Matrix backward(const NeuronLayerState& state, const Matrix& voltages, const Matrix& upstream);

// Output power (uW) for a single chain voltage (uV).
double neuron_output(const NeuronLayerState& state, double voltage_uv) noexcept;

}  // namespace spinrf
