#pragma once

// The physical network: a first synaptic layer on the input spectrum,
// optionally followed by a layer of oscillators and a second synaptic layer
// whose input "bins" are the oscillator frequencies. Outputs are the last
// layer's chain voltages scaled into logits, or, with the optional output
// head, normalized output-oscillator powers in [0, 1].

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "spinrf/frequency_grid.hpp"
#include "spinrf/model.hpp"
#include "spinrf/neuron_layer.hpp"
#include "spinrf/synapse_chain.hpp"

namespace spinrf {

struct ModelMetadata {
  std::string config_hash;
  std::int64_t created_unix = 0;
  bool operator==(const ModelMetadata&) const = default;
};

struct NetworkModel {
  FrequencyGrid input_grid;
  ChainLayerState layer1;
  std::optional<NeuronLayerState> hidden;
  std::optional<ChainLayerState> layer2;
  std::optional<NeuronLayerState> output_neurons;  // one per output chain
  double logit_scale = 1e-3;  // logits = last-layer voltage (uV) * logit_scale
  ModelMetadata metadata;

  bool two_layer() const noexcept { return hidden.has_value(); }
  const ChainLayerState& last_layer() const noexcept { return layer2 ? *layer2 : layer1; }
  std::size_t n_inputs() const noexcept { return input_grid.n_bins; }
  std::size_t n_outputs() const noexcept { return last_layer().n_chains(); }

  void validate() const;
  bool operator==(const NetworkModel&) const = default;
};

// Shapes and constants used to build a fresh model.
struct NetworkSpec {
  FrequencyGrid input_grid{20e6, 120e6, 256};
  std::size_t hidden = 128;  // 0 -> single synaptic layer
  std::size_t outputs = 10;
  std::size_t resonators1 = 0;  // 0 -> one per input bin
  std::size_t resonators2 = 0;  // 0 -> one per hidden neuron
  // Default bands are the input (hidden emission) span widened by a relative
  // margin, so that resonators at the edges can sit on either side of a bin
  // and give weights of either sign.
  std::optional<FrequencyBand> band1;
  std::optional<FrequencyBand> band2;
  double band1_margin = 0.05;
  double band2_margin = 0.1;
  double hidden_f_lo = 1e9;
  double hidden_f_hi = 5e9;
  double g_m = 1.81e-3;     // A/V
  double v_layer = 0.013;   // V
  double jitter = 0.25;
  SignMode sign_mode = SignMode::alternating;
  ResonatorParams resonator{};
  OscillatorParams oscillator{};
  bool hidden_clamped = true;
  bool output_neuron = false;
  double output_g_m = 1.81e-3;
  bool output_clamped = true;
  double logit_scale = 1e-3;
};

NetworkModel make_network(const NetworkSpec& spec, std::uint64_t seed);

// Intermediate values of one forward pass.
struct NetworkTrace {
  Matrix w1, v1;       // layer-1 weights and voltages
  Matrix h;            // hidden powers (two-layer only)
  Matrix w2, v2;       // layer-2 weights and voltages (two-layer only)
  Matrix outputs;
};

NetworkTrace forward_trace(const NetworkModel& model, const Matrix& batch);
Matrix forward(const NetworkModel& model, const Matrix& batch);

struct ParamGrads {
  Matrix f_res1;
  std::vector<double> v_chains1;
  Matrix f_res2;
  std::vector<double> v_chains2;
};

ParamGrads backward(const NetworkModel& model, const Matrix& batch, const Matrix& output_grads);
ParamGrads backward(const NetworkModel& model, const NetworkTrace& trace, const Matrix& batch,
                    const Matrix& output_grads);

struct TrainUnits {
  double freq_unit_hz = 1e9;  // optimizer unit for resonance frequencies
  double bias_unit_v = 1.0;   // optimizer unit for chain biases
};

// TrainableModel adapter over a NetworkModel.
class PhysicalNetwork final : public TrainableModel {
 public:
  explicit PhysicalNetwork(NetworkModel model, TrainUnits units = {});

  const NetworkModel& model() const noexcept { return model_; }
  NetworkModel& model() noexcept { return model_; }

  std::size_t n_inputs() const override { return model_.n_inputs(); }
  std::size_t n_outputs() const override { return model_.n_outputs(); }
  Matrix forward(const Matrix& inputs) const override;
  Matrix forward_backward(const Matrix& inputs, const OutputGradFn& output_grad,
                          std::vector<std::vector<double>>& grads) override;
  std::vector<ParamBlock> parameters() override;
  std::unique_ptr<TrainableModel> clone() const override;

 private:
  NetworkModel model_;
  TrainUnits units_;
};

}  // namespace spinrf
