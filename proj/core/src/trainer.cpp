#include "spinrf/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "spinrf/errors.hpp"

namespace spinrf {

void LabeledData::validate() const {
  if (x.rows() != y.size()) throw StructuralError("dataset: inputs and labels differ in count");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw DataError("dataset: label " + std::to_string(label) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
  }
}

LabeledData subset(const LabeledData& data, const std::vector<std::size_t>& indices) {
  LabeledData out;
  out.n_classes = data.n_classes;
  out.x = Matrix(indices.size(), data.x.cols());
  out.y.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = data.x.row(indices[r]);
    std::copy(src.begin(), src.end(), out.x.row(r).begin());
    out.y.push_back(data.y[indices[r]]);
  }
  return out;
}

std::pair<LabeledData, LabeledData> split(const LabeledData& data, double fraction,
                                          std::uint64_t seed) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_first =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size())));
  std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_first));
  std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(n_first), idx.end());
  return {subset(data, a), subset(data, b)};
}

const char* to_string(LossKind k) noexcept {
  return k == LossKind::cross_entropy ? "cross_entropy" : "mse";
}

LossKind loss_from_string(const std::string& s) {
  if (s == "cross_entropy" || s == "ce") return LossKind::cross_entropy;
  if (s == "mse") return LossKind::mse;
  throw ConfigError("unknown loss '" + s + "' (expected cross_entropy or mse)");
}

LossResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels) {
  if (logits.rows() != labels.size()) throw StructuralError("loss: batch size mismatch");
  const std::size_t batch = logits.rows();
  const std::size_t n = logits.cols();
  LossResult r;
  r.grad = Matrix(batch, n);
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    auto z = logits.row(b);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double log_sum = std::log(sum) + zmax;
    const auto label = static_cast<std::size_t>(labels[b]);
    r.value += (log_sum - z[label]) * inv_b;
    for (std::size_t o = 0; o < n; ++o) {
      const double p = std::exp(z[o] - log_sum);
      r.grad(b, o) = (p - (o == label ? 1.0 : 0.0)) * inv_b;
    }
  }
  return r;
}

LossResult mse_loss(const Matrix& outputs, std::span<const int> labels) {
  if (outputs.rows() != labels.size()) throw StructuralError("loss: batch size mismatch");
  const std::size_t batch = outputs.rows();
  const std::size_t n = outputs.cols();
  LossResult r;
  r.grad = Matrix(batch, n);
  const double inv = 1.0 / static_cast<double>(batch * n);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < n; ++o) {
      const double target = n == 1 ? static_cast<double>(labels[b])
                                   : (static_cast<int>(o) == labels[b] ? 1.0 : 0.0);
      const double d = outputs(b, o) - target;
      r.value += d * d * inv;
      r.grad(b, o) = 2.0 * d * inv;
    }
  }
  return r;
}

LossResult compute_loss(LossKind kind, const Matrix& outputs, std::span<const int> labels) {
  return kind == LossKind::cross_entropy ? cross_entropy_loss(outputs, labels)
                                         : mse_loss(outputs, labels);
}

std::vector<int> predict_classes(const Matrix& outputs) {
  std::vector<int> out(outputs.rows());
  for (std::size_t b = 0; b < outputs.rows(); ++b) {
    auto row = outputs.row(b);
    if (row.size() == 1) {
      out[b] = row[0] > 0.5 ? 1 : 0;
    } else {
      out[b] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
  }
  return out;
}

double accuracy(const Matrix& outputs, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto pred = predict_classes(outputs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += pred[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

Matrix predict(const TrainableModel& model, const Matrix& x, std::size_t chunk) {
  Matrix out(x.rows(), model.n_outputs());
  for (std::size_t start = 0; start < x.rows(); start += chunk) {
    const std::size_t n = std::min(chunk, x.rows() - start);
    Matrix part(n, x.cols());
    std::copy_n(x.row(start).data(), n * x.cols(), part.data());
    Matrix o = model.forward(part);
    std::copy_n(o.data(), o.size(), out.row(start).data());
  }
  return out;
}

double evaluate_accuracy(const TrainableModel& model, const LabeledData& data) {
  if (data.empty()) return 0.0;
  return accuracy(predict(model, data.x), data.y);
}

void adam_step(std::vector<ParamBlock>& blocks, const std::vector<std::vector<double>>& grads,
               AdamState& state, const AdamConfig& cfg) {
  if (grads.size() != blocks.size()) throw StructuralError("adam: gradient block count mismatch");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (grads[b].size() != blocks[b].values.size()) {
      throw StructuralError("adam: gradient size mismatch in block '" + blocks[b].name + "'");
    }
    for (double g : grads[b]) {
      if (!std::isfinite(g)) {
        throw NumericError("adam: non-finite gradient in block '" + blocks[b].name + "'");
      }
    }
  }
  if (state.m.size() != blocks.size()) {
    state.m.assign(blocks.size(), {});
    state.v.assign(blocks.size(), {});
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      state.m[b].assign(blocks[b].values.size(), 0.0);
      state.v[b].assign(blocks[b].values.size(), 0.0);
    }
    state.step = 0;
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    ParamBlock& blk = blocks[b];
    auto& m = state.m[b];
    auto& v = state.v[b];
    for (std::size_t i = 0; i < blk.values.size(); ++i) {
      const double g = grads[b][i] * blk.unit;  // gradient w.r.t. value / unit
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double step = cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
      blk.values[i] -= step * blk.unit;
    }
    if (blk.clip) {
      for (double& x : blk.values) x = std::clamp(x, blk.clip->lo, blk.clip->hi);
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train: learning_rate must be finite and >= 0");
  }
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
}

TrainResult train(TrainableModel& model, const LabeledData& train_set,
                  const LabeledData* test_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  train_set.validate();
  if (train_set.x.cols() != model.n_inputs()) {
    throw StructuralError("train: data has " + std::to_string(train_set.x.cols()) +
                          " inputs, model expects " + std::to_string(model.n_inputs()));
  }
  const bool has_test = test_set && !test_set->empty();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  TrainResult result;
  result.initial_train_acc = evaluate_accuracy(model, train_set);
  result.initial_test_acc = has_test ? evaluate_accuracy(model, *test_set) : nan;
  double best_score = has_test ? result.initial_test_acc : result.initial_train_acc;
  result.best_model = model.clone();

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  AdamState adam;
  const AdamConfig adam_cfg{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps};
  std::vector<std::vector<double>> grads;
  std::vector<int> labels;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      Matrix xb(n, train_set.x.cols());
      labels.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        auto src = train_set.x.row(order[start + r]);
        std::copy(src.begin(), src.end(), xb.row(r).begin());
        labels[r] = train_set.y[order[start + r]];
      }
      double batch_loss = 0.0;
      model.forward_backward(
          xb,
          [&](const Matrix& out) {
            LossResult lr = compute_loss(cfg.loss, out, labels);
            batch_loss = lr.value;
            return std::move(lr.grad);
          },
          grads);
      if (!std::isfinite(batch_loss)) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
      }
      auto blocks = model.parameters();
      adam_step(blocks, grads, adam, adam_cfg);
      loss_sum += batch_loss;
      ++n_batches;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(n_batches);
    rec.train_acc = evaluate_accuracy(model, train_set);
    rec.test_acc = has_test ? evaluate_accuracy(model, *test_set) : nan;
    result.history.push_back(rec);
    const double score = has_test ? rec.test_acc : rec.train_acc;
    if (score > best_score) {
      best_score = score;
      result.best_epoch = epoch;
      result.best_model = model.clone();
    }
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string history_csv(const std::vector<EpochRecord>& h) {
  std::string out = "epoch,loss,train_acc,test_acc\n";
  for (const auto& r : h) {
    out += std::to_string(r.epoch) + "," + fmt(r.loss) + "," + fmt(r.train_acc) + "," +
           fmt(r.test_acc) + "\n";
  }
  return out;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& h) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << history_csv(h);
}

void write_history_json(const std::filesystem::path& path, const std::vector<EpochRecord>& h) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : h) {
    arr.push_back({{"epoch", r.epoch},
                   {"loss", r.loss},
                   {"train_acc", r.train_acc},
                   {"test_acc", std::isnan(r.test_acc) ? nlohmann::json(nullptr)
                                                       : nlohmann::json(r.test_acc)}});
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << nlohmann::json{{"history", arr}}.dump(2) << "\n";
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace spinrf
