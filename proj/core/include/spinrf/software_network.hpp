#pragma once

// Conventional dense network with the same layer shapes as a NetworkModel;
// the reference the physical network is compared against.

#include <cstdint>
#include <memory>
#include <vector>

#include "spinrf/matrix.hpp"
#include "spinrf/model.hpp"

namespace spinrf {

enum class Activation { relu, sigmoid, identity };

struct EquivalentSoftwareModel {
  Matrix w1;                // [H x n_in], or [n_out x n_in] for a single layer
  std::vector<double> b1;
  Matrix w2;                // [n_out x H]; empty for a single layer
  std::vector<double> b2;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  bool two_layer() const noexcept { return !w2.empty(); }
  std::size_t n_inputs() const noexcept { return w1.cols(); }
  std::size_t n_outputs() const noexcept { return two_layer() ? w2.rows() : w1.rows(); }
  void validate() const;
  bool operator==(const EquivalentSoftwareModel&) const = default;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization for weights and biases.
EquivalentSoftwareModel make_software_model(std::size_t n_inputs, std::size_t hidden,
                                            std::size_t outputs, std::uint64_t seed,
                                            Activation output_activation = Activation::identity);

class SoftwareNetwork final : public TrainableModel {
 public:
  explicit SoftwareNetwork(EquivalentSoftwareModel model);

  const EquivalentSoftwareModel& model() const noexcept { return model_; }

  std::size_t n_inputs() const override { return model_.n_inputs(); }
  std::size_t n_outputs() const override { return model_.n_outputs(); }
  Matrix forward(const Matrix& inputs) const override;
  Matrix forward_backward(const Matrix& inputs, const OutputGradFn& output_grad,
                          std::vector<std::vector<double>>& grads) override;
  std::vector<ParamBlock> parameters() override;
  std::unique_ptr<TrainableModel> clone() const override;

 private:
  EquivalentSoftwareModel model_;
};

}  // namespace spinrf
