#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spinrf/matrix.hpp"
#include "spinrf/model.hpp"

namespace spinrf {

// Inputs [N x n_in] with integer class labels.
struct LabeledData {
  Matrix x;
  std::vector<int> y;
  std::size_t n_classes = 0;

  std::size_t size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.empty(); }
  void validate() const;
};

// Rows `indices` of `data`, in that order.
LabeledData subset(const LabeledData& data, const std::vector<std::size_t>& indices);

// Deterministic shuffled split; the first part keeps round(fraction * N) samples.
std::pair<LabeledData, LabeledData> split(const LabeledData& data, double fraction,
                                          std::uint64_t seed);

enum class LossKind { cross_entropy, mse };
const char* to_string(LossKind k) noexcept;
LossKind loss_from_string(const std::string& s);

struct LossResult {
  double value = 0.0;   // mean over the batch
  Matrix grad;          // dL/d(outputs)
};

// Softmax cross-entropy on logits.
LossResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels);
// Mean squared error against the label (single output) or a one-hot target.
LossResult mse_loss(const Matrix& outputs, std::span<const int> labels);
LossResult compute_loss(LossKind kind, const Matrix& outputs, std::span<const int> labels);

// Predicted class per row: argmax with ties to the lowest index, or for a
// single output, class 1 iff output > 0.5.
std::vector<int> predict_classes(const Matrix& outputs);
double accuracy(const Matrix& outputs, std::span<const int> labels);

// Model outputs over a whole dataset, evaluated in chunks.
Matrix predict(const TrainableModel& model, const Matrix& x, std::size_t chunk = 1000);
double evaluate_accuracy(const TrainableModel& model, const LabeledData& data);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update in optimizer units (value / block.unit),
// followed by the block's band projection. Throws NumericError on a
// non-finite gradient before touching any parameter.
void adam_step(std::vector<ParamBlock>& blocks, const std::vector<std::vector<double>>& grads,
               AdamState& state, const AdamConfig& cfg);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  LossKind loss = LossKind::cross_entropy;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;   // 1-based
  double loss = 0.0;       // mean training loss over the epoch's batches
  double train_acc = 0.0;
  double test_acc = 0.0;   // NaN when no test set was given
};

struct TrainResult {
  std::vector<EpochRecord> history;
  double initial_train_acc = 0.0;
  double initial_test_acc = 0.0;
  std::size_t best_epoch = 0;  // 0 means the untrained model was never beaten
  std::unique_ptr<TrainableModel> best_model;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains `model` in place. The best model is picked on test accuracy when a
// test set is given, otherwise on train accuracy.
TrainResult train(TrainableModel& model, const LabeledData& train_set,
                  const LabeledData* test_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& h);
void write_history_json(const std::filesystem::path& path, const std::vector<EpochRecord>& h);
std::string history_csv(const std::vector<EpochRecord>& h);

// Derives an independent 64-bit seed from a master seed and a stream index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

}  // namespace spinrf
