#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinrf/matrix.hpp"
#include "spinrf/synapse_chain.hpp"

namespace spinrf {

// One contiguous block of trainable parameters as seen by the optimizer.
// The optimizer works on values / unit, so `unit` fixes the physical size of
// a unit step (e.g. 1e9 makes a resonance-frequency step of 1 mean 1 GHz).
struct ParamBlock {
  std::string name;
  std::span<double> values;
  double unit = 1.0;
  std::optional<FrequencyBand> clip;  // projection applied after every update
};

// Given the model outputs [B x n_out], returns dL/d(outputs).
using OutputGradFn = std::function<Matrix(const Matrix& outputs)>;

class TrainableModel {
 public:
  virtual ~TrainableModel() = default;

  virtual std::size_t n_inputs() const = 0;
  virtual std::size_t n_outputs() const = 0;
  virtual Matrix forward(const Matrix& inputs) const = 0;

  // Forward pass, then back-propagates dL/d(outputs) into `grads`, one vector
  // per parameter block (same order and sizes as parameters()). Returns the
  // outputs of the forward pass.
  virtual Matrix forward_backward(const Matrix& inputs, const OutputGradFn& output_grad,
                                  std::vector<std::vector<double>>& grads) = 0;

  virtual std::vector<ParamBlock> parameters() = 0;
  virtual std::unique_ptr<TrainableModel> clone() const = 0;
};

}  // namespace spinrf
