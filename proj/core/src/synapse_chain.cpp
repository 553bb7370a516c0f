#include "spinrf/synapse_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinrf/errors.hpp"

namespace spinrf {

namespace {

constexpr double kMicroPerUnit = 1e6;

void check_inputs(std::span<const double> freqs, const Matrix& powers) {
  if (powers.cols() != freqs.size()) {
    throw StructuralError("synapse layer: input has " + std::to_string(powers.cols()) +
                          " bins but the layer expects " + std::to_string(freqs.size()));
  }
}

void check_non_negative(const Matrix& powers) {
  for (double p : powers.flat()) {
    if (!(p >= 0.0)) throw DomainError("synapse layer: input powers must be non-negative");
  }
}

}  // namespace

const char* to_string(SignMode m) noexcept {
  return m == SignMode::alternating ? "alternating" : "uniform";
}

SignMode sign_mode_from_string(const std::string& s) {
  if (s == "alternating") return SignMode::alternating;
  if (s == "uniform") return SignMode::uniform;
  throw ConfigError("unknown sign mode '" + s + "'");
}

void ChainLayerState::validate() const {
  resonator.validate();
  if (f_res.rows() == 0 || f_res.cols() == 0) throw StructuralError("chain layer: empty f_res");
  if (v_chains.size() != f_res.rows()) {
    throw StructuralError("chain layer: v_chains has " + std::to_string(v_chains.size()) +
                          " entries for " + std::to_string(f_res.rows()) + " chains");
  }
  if (!(band.lo > 0.0) || !(band.hi >= band.lo)) {
    throw DomainError("chain layer: invalid frequency band");
  }
  for (double f : f_res.flat()) {
    if (!band.contains(f)) {
      throw DomainError("chain layer: resonance frequency " + std::to_string(f) +
                        " Hz outside band");
    }
  }
}

void ChainLayerState::clip_to_band() noexcept {
  for (double& f : f_res.flat()) f = std::clamp(f, band.lo, band.hi);
}

ChainLayerState make_chain_layer(std::span<const double> input_freqs, const ChainInit& init,
                                 std::mt19937_64& rng) {
  if (input_freqs.empty()) throw StructuralError("chain layer: no input frequencies");
  if (init.n_chains == 0) throw StructuralError("chain layer: need at least one chain");
  const auto [lo_it, hi_it] = std::minmax_element(input_freqs.begin(), input_freqs.end());
  FrequencyBand band = init.band;
  if (band.lo == 0.0 && band.hi == 0.0) band = {*lo_it, *hi_it};

  const std::size_t n_in = input_freqs.size();
  const std::size_t n_res = init.n_resonators ? init.n_resonators : n_in;
  const double bin_spacing =
      n_in > 1 ? (*hi_it - *lo_it) / static_cast<double>(n_in - 1) : init.resonator.alpha * *lo_it;

  ChainLayerState s;
  s.f_res = Matrix(init.n_chains, n_res);
  s.v_chains.assign(init.n_chains, 0.0);
  s.v_layer = init.v_layer;
  s.sign_mode = init.sign_mode;
  s.resonator = init.resonator;
  s.band = band;

  std::uniform_real_distribution<double> jitter(-init.jitter, init.jitter);
  for (std::size_t j = 0; j < init.n_chains; ++j) {
    for (std::size_t k = 0; k < n_res; ++k) {
      double base;
      if (n_res == n_in) {
        base = input_freqs[k];
      } else {
        const double pos = n_res > 1 ? static_cast<double>(k) * static_cast<double>(n_in - 1) /
                                           static_cast<double>(n_res - 1)
                                     : 0.5 * static_cast<double>(n_in - 1);
        base = *lo_it + pos * bin_spacing;
      }
      s.f_res(j, k) = base + jitter(rng) * bin_spacing;
    }
  }
  s.clip_to_band();
  s.validate();
  return s;
}

Matrix effective_weights(const ChainLayerState& state, std::span<const double> input_freqs) {
  for (double f : state.f_res.flat()) {
    if (!std::isfinite(f) || f <= 0.0) {
      throw DomainError("effective_weights: non-positive or non-finite resonance frequency");
    }
  }
  const std::size_t m = state.n_chains();
  const std::size_t n_res = state.n_resonators();
  const std::size_t n_in = input_freqs.size();
  const double alpha = state.resonator.alpha;
  const double k_sd = state.resonator.k_sd;
  const double* fi = input_freqs.data();

  Matrix w(m, n_in);
  for (std::size_t j = 0; j < m; ++j) {
    double* wrow = w.row(j).data();
    for (std::size_t k = 0; k < n_res; ++k) {
      const double f = state.f_res(j, k);
      const double c = alpha * f;
      const double scale = 2.0 * c * k_sd * state.sign(k);
      const double c2 = c * c;
#pragma omp simd
      for (std::size_t i = 0; i < n_in; ++i) {
        const double x = fi[i] - f;
        wrow[i] += scale * x / (c2 + x * x);
      }
    }
  }
  return w;
}

Matrix weight_grad_to_fres(const ChainLayerState& state, std::span<const double> input_freqs,
                           const Matrix& grad_w) {
  const std::size_t m = state.n_chains();
  const std::size_t n_res = state.n_resonators();
  const std::size_t n_in = input_freqs.size();
  require_shape(grad_w, m, n_in, "weight_grad_to_fres: grad_w");
  const double alpha = state.resonator.alpha;
  const double k_sd = state.resonator.k_sd;
  const double* fi = input_freqs.data();

  Matrix g(m, n_res);
  for (std::size_t j = 0; j < m; ++j) {
    const double* gw = grad_w.row(j).data();
    for (std::size_t k = 0; k < n_res; ++k) {
      const double f = state.f_res(j, k);
      const double c = alpha * f;
      const double c2 = c * c;
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < n_in; ++i) {
        const double x = fi[i] - f;
        const double d = c2 + x * x;
        const double num = (alpha * x - c) * d - c * x * (2.0 * alpha * c - 2.0 * x);
        acc += gw[i] * num / (d * d);
      }
      g(j, k) = 2.0 * k_sd * state.sign(k) * acc;
    }
  }
  return g;
}

Matrix forward_with_weights(const ChainLayerState& state, const Matrix& weights,
                            const Matrix& powers) {
  const std::size_t m = state.n_chains();
  if (weights.rows() != m || weights.cols() != powers.cols()) {
    throw StructuralError("synapse forward: weights do not match inputs");
  }
  check_non_negative(powers);
  const std::size_t batch = powers.rows();
  const std::size_t n_in = powers.cols();
  Matrix v(batch, m);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* p = powers.row(b).data();
    for (std::size_t j = 0; j < m; ++j) {
      const double* w = weights.row(j).data();
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < n_in; ++i) acc += p[i] * w[i];
      v(b, j) = acc + (state.v_chains[j] + state.v_layer) * kMicroPerUnit;
    }
  }
  return v;
}

Matrix forward(const ChainLayerState& state, std::span<const double> input_freqs,
               const Matrix& powers) {
  check_inputs(input_freqs, powers);
  return forward_with_weights(state, effective_weights(state, input_freqs), powers);
}

ChainGrads backward_with_weights(const ChainLayerState& state,
                                 std::span<const double> input_freqs, const Matrix& weights,
                                 const Matrix& powers, const Matrix& upstream,
                                 bool need_input_grad) {
  const std::size_t m = state.n_chains();
  const std::size_t n_in = input_freqs.size();
  check_inputs(input_freqs, powers);
  require_shape(weights, m, n_in, "synapse backward: weights");
  require_shape(upstream, powers.rows(), m, "synapse backward: upstream");

  const std::size_t batch = powers.rows();
  ChainGrads g;
  g.v_chains.assign(m, 0.0);

  // dL/dW[j][i] = sum_b up[b][j] P[b][i]
  Matrix grad_w(m, n_in);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* p = powers.row(b).data();
    for (std::size_t j = 0; j < m; ++j) {
      const double u = upstream(b, j);
      g.v_chains[j] += u;
      if (u == 0.0) continue;
      double* gw = grad_w.row(j).data();
#pragma omp simd
      for (std::size_t i = 0; i < n_in; ++i) gw[i] += u * p[i];
    }
  }
  for (double& v : g.v_chains) v *= kMicroPerUnit;
  g.f_res = weight_grad_to_fres(state, input_freqs, grad_w);

  if (need_input_grad) {
    g.powers = Matrix(batch, n_in);
    for (std::size_t b = 0; b < batch; ++b) {
      double* gp = g.powers.row(b).data();
      for (std::size_t j = 0; j < m; ++j) {
        const double u = upstream(b, j);
        if (u == 0.0) continue;
        const double* w = weights.row(j).data();
#pragma omp simd
        for (std::size_t i = 0; i < n_in; ++i) gp[i] += u * w[i];
      }
    }
  }
  return g;
}

ChainGrads backward(const ChainLayerState& state, std::span<const double> input_freqs,
                    const Matrix& powers, const Matrix& upstream) {
  return backward_with_weights(state, input_freqs, effective_weights(state, input_freqs), powers,
                               upstream);
}

double neighbor_weight_correlation(const Matrix& weights, std::size_t first, std::size_t last) {
  last = std::min(last, weights.cols() > 0 ? weights.cols() - 1 : 0);
  const std::size_t m = weights.rows();
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = first; i < last; ++i) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      ma += weights(j, i);
      mb += weights(j, i + 1);
    }
    ma /= static_cast<double>(m);
    mb /= static_cast<double>(m);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double a = weights(j, i) - ma;
      const double b = weights(j, i + 1) - mb;
      sab += a * b;
      saa += a * a;
      sbb += b * b;
    }
    if (saa <= 0.0 || sbb <= 0.0) continue;
    total += sab / std::sqrt(saa * sbb);
    ++count;
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace spinrf
