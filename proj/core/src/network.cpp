#include "spinrf/network.hpp"

#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "spinrf/errors.hpp"

namespace spinrf {

void NetworkModel::validate() const {
  input_grid.validate();
  layer1.validate();
  if (layer1.n_resonators() == 0) throw StructuralError("network: empty first layer");
  if (hidden.has_value() != layer2.has_value()) {
    throw StructuralError("network: hidden layer and second synaptic layer come together");
  }
  if (hidden) {
    hidden->validate();
    layer2->validate();
    if (hidden->size() != layer1.n_chains()) {
      throw StructuralError("network: hidden width " + std::to_string(hidden->size()) +
                            " != first-layer chains " + std::to_string(layer1.n_chains()));
    }
  }
  if (output_neurons) {
    output_neurons->validate();
    if (output_neurons->size() != last_layer().n_chains()) {
      throw StructuralError("network: one output neuron per output chain expected");
    }
  }
  if (!(logit_scale > 0.0)) throw DomainError("network: logit_scale must be positive");
}

namespace {

// FNV-1a over a canonical text rendering of the NetworkSpec and seed.
std::string spec_hash(const NetworkSpec& s, std::uint64_t seed) {
  std::ostringstream os;
  os.precision(17);
  os << s.input_grid.f_min << ' ' << s.input_grid.f_max << ' ' << s.input_grid.n_bins << ' '
     << s.hidden << ' ' << s.outputs << ' ' << s.resonators1 << ' ' << s.resonators2 << ' '
     << (s.band1 ? s.band1->lo : -1.0) << ' ' << (s.band1 ? s.band1->hi : -1.0) << ' '
     << (s.band2 ? s.band2->lo : -1.0) << ' ' << (s.band2 ? s.band2->hi : -1.0) << ' '
     << s.band1_margin << ' ' << s.band2_margin << ' ' << s.hidden_f_lo << ' ' << s.hidden_f_hi
     << ' ' << s.g_m << ' ' << s.v_layer << ' ' << s.jitter << ' ' << to_string(s.sign_mode)
     << ' ' << s.resonator.alpha << ' ' << s.resonator.k_sd << ' ' << s.oscillator.i_th << ' '
     << s.oscillator.q_nl << ' ' << s.oscillator.a_scale << ' ' << s.oscillator.r_ohm << ' '
     << s.oscillator.clamp_factor << ' ' << s.oscillator.shape_tmr_factor << ' '
     << s.hidden_clamped << ' ' << s.output_neuron << ' ' << s.output_g_m << ' '
     << s.output_clamped << ' ' << s.logit_scale << ' ' << seed;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

NetworkModel make_network(const NetworkSpec& spec, std::uint64_t seed) {
  spec.input_grid.validate();
  if (spec.outputs == 0) throw StructuralError("network: need at least one output");
  std::mt19937_64 rng(seed);
  const auto input_freqs = spec.input_grid.centers();

  NetworkModel m;
  m.input_grid = spec.input_grid;
  m.logit_scale = spec.logit_scale;
  m.metadata.config_hash = spec_hash(spec, seed);  // creation time is left to the caller

  ChainInit init1;
  init1.n_chains = spec.hidden ? spec.hidden : spec.outputs;
  init1.n_resonators = spec.resonators1;
  init1.band = spec.band1.value_or(FrequencyBand{spec.input_grid.f_min * (1.0 - spec.band1_margin),
                                                 spec.input_grid.f_max * (1.0 + spec.band1_margin)});
  init1.jitter = spec.jitter;
  // The layer offset biases chains that drive oscillators; plain logit
  // chains get none.
  init1.v_layer = (spec.hidden || spec.output_neuron) ? spec.v_layer : 0.0;
  init1.sign_mode = spec.sign_mode;
  init1.resonator = spec.resonator;
  m.layer1 = make_chain_layer(input_freqs, init1, rng);

  if (spec.hidden) {
    NeuronLayerState h;
    h.g_m = spec.g_m;
    h.emit_freqs = equidistant(spec.hidden_f_lo, spec.hidden_f_hi, spec.hidden);
    h.osc = spec.oscillator;
    h.clamped = spec.hidden_clamped;
    m.hidden = h;

    ChainInit init2;
    init2.n_chains = spec.outputs;
    init2.n_resonators = spec.resonators2;
    init2.band = spec.band2.value_or(FrequencyBand{spec.hidden_f_lo * (1.0 - spec.band2_margin),
                                                   spec.hidden_f_hi * (1.0 + spec.band2_margin)});
    init2.jitter = spec.jitter;
    init2.v_layer = spec.output_neuron ? spec.v_layer : 0.0;
    init2.sign_mode = spec.sign_mode;
    init2.resonator = spec.resonator;
    m.layer2 = make_chain_layer(h.emit_freqs, init2, rng);
  }

  if (spec.output_neuron) {
    NeuronLayerState out;
    out.g_m = spec.output_g_m;
    // Output oscillators are read directly; their frequencies only need to be distinct.
    out.emit_freqs = equidistant(spec.hidden_f_lo, spec.hidden_f_hi, spec.outputs);
    if (spec.outputs == 1) out.emit_freqs = {spec.hidden_f_lo};
    out.osc = spec.oscillator;
    out.clamped = spec.output_clamped;
    m.output_neurons = out;
  }
  m.validate();
  return m;
}

namespace {

Matrix scale(Matrix m, double s) {
  for (double& v : m.flat()) v *= s;
  return m;
}

double output_power_scale(const NeuronLayerState& n) {
  return 1.0 / (stno_clamp_power(n.osc) * 1e6);
}

}  // namespace

NetworkTrace forward_trace(const NetworkModel& model, const Matrix& batch) {
  if (batch.cols() != model.n_inputs()) {
    throw StructuralError("network: batch has " + std::to_string(batch.cols()) +
                          " bins, model expects " + std::to_string(model.n_inputs()));
  }
  NetworkTrace t;
  const auto freqs = model.input_grid.centers();
  t.w1 = effective_weights(model.layer1, freqs);
  t.v1 = forward_with_weights(model.layer1, t.w1, batch);
  const Matrix* last_v = &t.v1;
  if (model.two_layer()) {
    t.h = forward(*model.hidden, t.v1);
    t.w2 = effective_weights(*model.layer2, model.hidden->emit_freqs);
    t.v2 = forward_with_weights(*model.layer2, t.w2, t.h);
    last_v = &t.v2;
  }
  if (model.output_neurons) {
    t.outputs = scale(forward(*model.output_neurons, *last_v),
                      output_power_scale(*model.output_neurons));
  } else {
    t.outputs = scale(*last_v, model.logit_scale);
  }
  return t;
}

Matrix forward(const NetworkModel& model, const Matrix& batch) {
  return forward_trace(model, batch).outputs;
}

ParamGrads backward(const NetworkModel& model, const NetworkTrace& t, const Matrix& batch,
                    const Matrix& output_grads) {
  require_shape(output_grads, batch.rows(), model.n_outputs(), "network backward: output grads");
  const Matrix& last_v = model.two_layer() ? t.v2 : t.v1;
  Matrix grad_last;
  if (model.output_neurons) {
    grad_last = backward(*model.output_neurons, last_v,
                         scale(output_grads, output_power_scale(*model.output_neurons)));
  } else {
    grad_last = scale(output_grads, model.logit_scale);
  }

  ParamGrads g;
  const auto freqs = model.input_grid.centers();
  if (model.two_layer()) {
    ChainGrads g2 = backward_with_weights(*model.layer2, model.hidden->emit_freqs, t.w2, t.h,
                                          grad_last, true);
    Matrix grad_v1 = backward(*model.hidden, t.v1, g2.powers);
    ChainGrads g1 = backward_with_weights(model.layer1, freqs, t.w1, batch, grad_v1, false);
    g.f_res1 = std::move(g1.f_res);
    g.v_chains1 = std::move(g1.v_chains);
    g.f_res2 = std::move(g2.f_res);
    g.v_chains2 = std::move(g2.v_chains);
  } else {
    ChainGrads g1 = backward_with_weights(model.layer1, freqs, t.w1, batch, grad_last, false);
    g.f_res1 = std::move(g1.f_res);
    g.v_chains1 = std::move(g1.v_chains);
  }
  return g;
}

ParamGrads backward(const NetworkModel& model, const Matrix& batch, const Matrix& output_grads) {
  return backward(model, forward_trace(model, batch), batch, output_grads);
}

PhysicalNetwork::PhysicalNetwork(NetworkModel model, TrainUnits units)
    : model_(std::move(model)), units_(units) {
  model_.validate();
}

Matrix PhysicalNetwork::forward(const Matrix& inputs) const {
  return spinrf::forward(model_, inputs);
}

Matrix PhysicalNetwork::forward_backward(const Matrix& inputs, const OutputGradFn& output_grad,
                                         std::vector<std::vector<double>>& grads) {
  NetworkTrace t = forward_trace(model_, inputs);
  ParamGrads g = backward(model_, t, inputs, output_grad(t.outputs));
  grads.resize(model_.two_layer() ? 4 : 2);
  grads[0].assign(g.f_res1.flat().begin(), g.f_res1.flat().end());
  grads[1] = std::move(g.v_chains1);
  if (model_.two_layer()) {
    grads[2].assign(g.f_res2.flat().begin(), g.f_res2.flat().end());
    grads[3] = std::move(g.v_chains2);
  }
  return std::move(t.outputs);
}

std::vector<ParamBlock> PhysicalNetwork::parameters() {
  std::vector<ParamBlock> blocks;
  blocks.push_back({"layer1.f_res", model_.layer1.f_res.flat(), units_.freq_unit_hz,
                    model_.layer1.band});
  blocks.push_back({"layer1.v_chains", model_.layer1.v_chains, units_.bias_unit_v, std::nullopt});
  if (model_.two_layer()) {
    blocks.push_back({"layer2.f_res", model_.layer2->f_res.flat(), units_.freq_unit_hz,
                      model_.layer2->band});
    blocks.push_back(
        {"layer2.v_chains", model_.layer2->v_chains, units_.bias_unit_v, std::nullopt});
  }
  return blocks;
}

std::unique_ptr<TrainableModel> PhysicalNetwork::clone() const {
  return std::make_unique<PhysicalNetwork>(*this);
}

}  // namespace spinrf
