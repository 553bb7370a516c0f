#include "spinrf/software_network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "spinrf/errors.hpp"

namespace spinrf {

namespace {

double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity: break;
  }
  return z;
}

// Derivative expressed through the activation output y = act(z) and z.
double activate_grad(Activation a, double z, double y) noexcept {
  switch (a) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return y * (1.0 - y);
    case Activation::identity: break;
  }
  return 1.0;
}

// z = x W^T + b
Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
  Matrix z(x.rows(), w.rows());
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row(r).data();
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const double* wr = w.row(o).data();
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < n; ++i) acc += xr[i] * wr[i];
      z(r, o) = acc + b[o];
    }
  }
  return z;
}

Matrix apply(Activation a, const Matrix& z) {
  Matrix y(z.rows(), z.cols());
  for (std::size_t n = 0; n < z.size(); ++n) y.flat()[n] = activate(a, z.flat()[n]);
  return y;
}

void init_uniform(Matrix& w, std::vector<double>& b, std::size_t rows, std::size_t fan_in,
                  std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  w = Matrix(rows, fan_in);
  for (double& v : w.flat()) v = u(rng);
  b.resize(rows);
  for (double& v : b) v = u(rng);
}

// Accumulates dL/dW += g^T x, dL/db += colsum(g); returns dL/dx = g W if requested.
Matrix affine_backward(const Matrix& x, const Matrix& w, const Matrix& g, double* gw, double* gb,
                       bool need_input_grad) {
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row(r).data();
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const double u = g(r, o);
      gb[o] += u;
      if (u == 0.0) continue;
      double* gwr = gw + o * n;
#pragma omp simd
      for (std::size_t i = 0; i < n; ++i) gwr[i] += u * xr[i];
    }
  }
  Matrix gx;
  if (need_input_grad) {
    gx = Matrix(x.rows(), n);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double* gxr = gx.row(r).data();
      for (std::size_t o = 0; o < w.rows(); ++o) {
        const double u = g(r, o);
        if (u == 0.0) continue;
        const double* wr = w.row(o).data();
#pragma omp simd
        for (std::size_t i = 0; i < n; ++i) gxr[i] += u * wr[i];
      }
    }
  }
  return gx;
}

}  // namespace

void EquivalentSoftwareModel::validate() const {
  if (w1.empty() || b1.size() != w1.rows()) throw StructuralError("software model: bad layer 1");
  if (two_layer() && (w2.cols() != w1.rows() || b2.size() != w2.rows())) {
    throw StructuralError("software model: bad layer 2");
  }
}

EquivalentSoftwareModel make_software_model(std::size_t n_inputs, std::size_t hidden,
                                            std::size_t outputs, std::uint64_t seed,
                                            Activation output_activation) {
  if (n_inputs == 0 || outputs == 0) throw StructuralError("software model: empty shape");
  std::mt19937_64 rng(seed);
  EquivalentSoftwareModel m;
  m.output_activation = output_activation;
  if (hidden) {
    init_uniform(m.w1, m.b1, hidden, n_inputs, rng);
    init_uniform(m.w2, m.b2, outputs, hidden, rng);
  } else {
    init_uniform(m.w1, m.b1, outputs, n_inputs, rng);
  }
  return m;
}

SoftwareNetwork::SoftwareNetwork(EquivalentSoftwareModel model) : model_(std::move(model)) {
  model_.validate();
}

Matrix SoftwareNetwork::forward(const Matrix& x) const {
  if (x.cols() != model_.n_inputs()) throw StructuralError("software model: input width");
  Matrix z1 = affine(x, model_.w1, model_.b1);
  if (!model_.two_layer()) return apply(model_.output_activation, z1);
  Matrix h = apply(model_.hidden_activation, z1);
  return apply(model_.output_activation, affine(h, model_.w2, model_.b2));
}

Matrix SoftwareNetwork::forward_backward(const Matrix& x, const OutputGradFn& output_grad,
                                         std::vector<std::vector<double>>& grads) {
  if (x.cols() != model_.n_inputs()) throw StructuralError("software model: input width");
  const bool deep = model_.two_layer();
  grads.assign(deep ? 4 : 2, {});
  grads[0].assign(model_.w1.size(), 0.0);
  grads[1].assign(model_.b1.size(), 0.0);

  Matrix z1 = affine(x, model_.w1, model_.b1);
  Matrix h, z2;
  if (deep) {
    h = apply(model_.hidden_activation, z1);
    z2 = affine(h, model_.w2, model_.b2);
  }
  const Matrix& z_out = deep ? z2 : z1;
  Matrix out = apply(model_.output_activation, z_out);
  Matrix g = output_grad(out);
  for (std::size_t n = 0; n < g.size(); ++n) {
    g.flat()[n] *= activate_grad(model_.output_activation, z_out.flat()[n], out.flat()[n]);
  }
  if (deep) {
    grads[2].assign(model_.w2.size(), 0.0);
    grads[3].assign(model_.b2.size(), 0.0);
    Matrix gh = affine_backward(h, model_.w2, g, grads[2].data(), grads[3].data(), true);
    for (std::size_t n = 0; n < gh.size(); ++n) {
      gh.flat()[n] *= activate_grad(model_.hidden_activation, z1.flat()[n], h.flat()[n]);
    }
    affine_backward(x, model_.w1, gh, grads[0].data(), grads[1].data(), false);
  } else {
    affine_backward(x, model_.w1, g, grads[0].data(), grads[1].data(), false);
  }
  return out;
}

std::vector<ParamBlock> SoftwareNetwork::parameters() {
  std::vector<ParamBlock> blocks;
  blocks.push_back({"w1", model_.w1.flat(), 1.0, std::nullopt});
  blocks.push_back({"b1", model_.b1, 1.0, std::nullopt});
  if (model_.two_layer()) {
    blocks.push_back({"w2", model_.w2.flat(), 1.0, std::nullopt});
    blocks.push_back({"b2", model_.b2, 1.0, std::nullopt});
  }
  return blocks;
}

std::unique_ptr<TrainableModel> SoftwareNetwork::clone() const {
  return std::make_unique<SoftwareNetwork>(*this);
}

}  // namespace spinrf
