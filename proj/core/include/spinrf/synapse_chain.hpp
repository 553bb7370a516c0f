#pragma once

// A synaptic layer made of M chains of N_res resonators connected in series.
// Every resonator of chain j rectifies every input frequency; the chain's
// DC output is the sum of its resonators' contributions:
//
//   W[j][i] = sum_k s_k G(f_i, f_res[j][k]),   s_k = (-1)^k (alternating) or +1
//   V[b][j] = sum_i P[b][i] W[j][i] + v_chains[j] + v_layer
//
// Powers are in uW, weights in uV/uW and voltages in uV. The biases are
// stored in volts and converted on use.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "spinrf/device_models.hpp"
#include "spinrf/matrix.hpp"

namespace spinrf {

enum class SignMode { alternating, uniform };

const char* to_string(SignMode m) noexcept;
SignMode sign_mode_from_string(const std::string& s);

struct FrequencyBand {
  double lo = 0.0;  // Hz
  double hi = 0.0;  // Hz
  bool contains(double f) const noexcept { return f >= lo && f <= hi; }
  bool operator==(const FrequencyBand&) const = default;
};

struct ChainLayerState {
  Matrix f_res;                   // [M x N_res], Hz, trainable
  std::vector<double> v_chains;   // [M], V, trainable
  double v_layer = 0.0;           // V, hyperparameter broadcast to every chain
  SignMode sign_mode = SignMode::alternating;
  ResonatorParams resonator;
  FrequencyBand band;

  std::size_t n_chains() const noexcept { return f_res.rows(); }
  std::size_t n_resonators() const noexcept { return f_res.cols(); }
  double sign(std::size_t k) const noexcept {
    return (sign_mode == SignMode::alternating && (k & 1U)) ? -1.0 : 1.0;
  }

  void validate() const;
  // Projects every resonance frequency onto the band.
  void clip_to_band() noexcept;

  bool operator==(const ChainLayerState&) const = default;
};

struct ChainInit {
  std::size_t n_chains = 1;
  std::size_t n_resonators = 0;  // 0 -> one resonator per input frequency
  FrequencyBand band{};          // {0, 0} -> span of the input frequencies
  double jitter = 0.25;          // uniform, in units of input-bin spacing
  double v_layer = 0.0;
  SignMode sign_mode = SignMode::alternating;
  ResonatorParams resonator{};
};

// Resonator k of every chain starts at input frequency k (or, when N_res
// differs from the input count, at evenly spread positions) plus uniform
// jitter, then is clipped to the band. Chain biases start at zero.
ChainLayerState make_chain_layer(std::span<const double> input_freqs, const ChainInit& init,
                                 std::mt19937_64& rng);

// [M x n_in] effective weight matrix.
Matrix effective_weights(const ChainLayerState& state, std::span<const double> input_freqs);

// d W[j][i] / d f_res[j][k] is s_k dG(f_i, f_res[j][k]); this returns
// grad_f_res[j][k] = s_k sum_i grad_w[j][i] dG(f_i, f_res[j][k]).
Matrix weight_grad_to_fres(const ChainLayerState& state, std::span<const double> input_freqs,
                           const Matrix& grad_w);

// Batch forward: [B x n_in] uW -> [B x M] uV. Throws DomainError on negative power.
Matrix forward(const ChainLayerState& state, std::span<const double> input_freqs,
               const Matrix& powers);
// Same, with weights already computed by effective_weights().
Matrix forward_with_weights(const ChainLayerState& state, const Matrix& weights,
                            const Matrix& powers);

struct ChainGrads {
  Matrix f_res;                  // [M x N_res], uV-loss units per Hz
  std::vector<double> v_chains;  // [M], per V
  Matrix powers;                 // [B x n_in], per uW
};

// Exact gradients of the forward map given dL/dV (upstream, [B x M], per uV).
ChainGrads backward(const ChainLayerState& state, std::span<const double> input_freqs,
                    const Matrix& powers, const Matrix& upstream);
ChainGrads backward_with_weights(const ChainLayerState& state,
                                 std::span<const double> input_freqs, const Matrix& weights,
                                 const Matrix& powers, const Matrix& upstream,
                                 bool need_input_grad = true);

// Mean Pearson correlation between adjacent weight columns W[:, i] and
// W[:, i + 1] for i in [first, last). Columns with zero variance are skipped.
double neighbor_weight_correlation(const Matrix& weights, std::size_t first, std::size_t last);

}  // namespace spinrf
