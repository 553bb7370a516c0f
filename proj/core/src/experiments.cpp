#include "spinrf/experiments.hpp"

#include <cstdio>
#include <limits>
#include <sstream>

#include "spinrf/errors.hpp"
#include "spinrf/software_network.hpp"

namespace spinrf {

void Task2DConfig::validate() const {
  if (n_samples < 10) throw ConfigError("task2d: n_samples must be >= 10");
  if (restarts < 1) throw ConfigError("task2d: restarts must be >= 1");
  if (epochs < 1 || batch_size < 1) throw ConfigError("task2d: epochs and batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !(freq_unit_hz > 0.0)) {
    throw ConfigError("task2d: learning_rate must be >= 0 and freq_unit_hz > 0");
  }
  if (!(g_m > 0.0)) throw ConfigError("task2d: g_m must be positive");
  if (!(hidden_f_hi > hidden_f_lo) || !(hidden_f_lo > 0.0)) {
    throw ConfigError("task2d: need 0 < hidden_f_lo < hidden_f_hi");
  }
  if (grid_points < 2) throw ConfigError("task2d: grid_points must be >= 2");
}

NetworkSpec task2d_network_spec(const Task2DConfig& cfg) {
  NetworkSpec spec;
  spec.input_grid = FrequencyGrid(kTaskFreq1, kTaskFreq2, 2);
  spec.hidden = 2;
  spec.outputs = 1;
  spec.hidden_f_lo = cfg.hidden_f_lo;
  spec.hidden_f_hi = cfg.hidden_f_hi;
  spec.g_m = cfg.g_m;
  spec.output_g_m = cfg.g_m;
  spec.v_layer = cfg.v_layer;
  spec.jitter = cfg.jitter;
  spec.output_neuron = cfg.output_neuron;
  return spec;
}

Task2DResult run_task2d(int task_id, const Task2DConfig& cfg) {
  cfg.validate();
  const auto ds = make_task2d(task_id, cfg.n_samples, cfg.data_seed);
  const auto train_set = to_labeled(ds, Split::train);
  const auto test_set = to_labeled(ds, Split::test);
  const auto spec = task2d_network_spec(cfg);

  TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.loss = LossKind::mse;

  Task2DResult res;
  res.task_id = task_id;
  res.name = task2d_name(task_id);
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(task_id) * 1000 + r);
    PhysicalNetwork net(make_network(spec, s), TrainUnits{cfg.freq_unit_hz, 1.0});
    tc.seed = derive_seed(s, 1);
    // Selection uses the final model and training data only.
    train(net, train_set, nullptr, tc);
    const double loss = mse_loss(predict(net, train_set.x), train_set.y).value;
    res.restart_train_loss.push_back(loss);
    if (loss < best_loss) {
      best_loss = loss;
      res.chosen_restart = r;
      res.model = net.model();
    }
  }
  const PhysicalNetwork best(res.model);
  res.train_loss = best_loss;
  res.train_acc = evaluate_accuracy(best, train_set);
  res.test_acc = evaluate_accuracy(best, test_set);

  const std::size_t g = cfg.grid_points;
  Matrix pts(g * g, 2);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      const double step = (kTaskPowerMax - kTaskPowerMin) / static_cast<double>(g - 1);
      pts(i * g + j, 0) = kTaskPowerMin + step * static_cast<double>(i);
      pts(i * g + j, 1) = kTaskPowerMin + step * static_cast<double>(j);
    }
  }
  const Matrix out = best.forward(pts);
  const auto cls = predict_classes(out);
  for (std::size_t k = 0; k < g * g; ++k) {
    res.grid.push_back({pts(k, 0), pts(k, 1), out(k, 0), cls[k]});
  }
  return res;
}

void SweepConfig::validate() const {
  if (!(f_min > 0.0)) throw ConfigError("sweep: f_min must be positive");
  if (f_max.empty()) throw ConfigError("sweep: need at least one f_max");
  for (double f : f_max) {
    if (!(f > f_min)) throw ConfigError("sweep: every f_max must exceed f_min");
  }
  if (repeats < 1 || epochs < 1 || batch_size < 1) {
    throw ConfigError("sweep: repeats, epochs and batch_size must be >= 1");
  }
  if (!(learning_rate >= 0.0) || !(logit_scale > 0.0) || !(freq_unit_hz > 0.0)) {
    throw ConfigError("sweep: bad learning_rate, logit_scale or freq_unit_hz");
  }
}

PixelData load_mnist_pixels(const MnistFiles& files, std::size_t train_limit,
                            std::size_t test_limit) {
  PixelData d;
  auto scale = [](Matrix m) {
    for (auto& v : m.flat()) v /= 255.0;
    return m;
  };
  d.train_x = scale(read_idx_images(files.train_images, train_limit).pixels);
  d.train_y = read_idx_labels(files.train_labels, train_limit);
  d.test_x = scale(read_idx_images(files.test_images, test_limit).pixels);
  d.test_y = read_idx_labels(files.test_labels, test_limit);
  if (d.train_x.rows() != d.train_y.size() || d.test_x.rows() != d.test_y.size()) {
    throw DataError("mnist: image and label counts differ");
  }
  if (d.train_x.cols() != 784) throw DataError("mnist: expected 28x28 images");
  return d;
}

NetworkSpec sweep_network_spec(const SweepConfig& cfg, double f_max) {
  NetworkSpec spec;
  spec.input_grid = FrequencyGrid(cfg.f_min, f_max, 784);
  spec.hidden = 0;
  spec.outputs = 10;
  spec.logit_scale = cfg.logit_scale;
  spec.jitter = cfg.jitter;
  return spec;
}

namespace {

LabeledData labeled(const Matrix& x, const std::vector<int>& y) {
  LabeledData d;
  d.x = x;
  d.y = y;
  d.n_classes = 10;
  return d;
}

}  // namespace

std::vector<SweepRow> run_freq_sweep(const PixelData& data, const SweepConfig& cfg,
                                     const SweepRowCallback& on_row,
                                     const EpochCallback& on_epoch) {
  cfg.validate();
  const auto train_set = labeled(data.train_x, data.train_y);
  const auto test_set = labeled(data.test_x, data.test_y);
  std::vector<SweepRow> rows;
  for (std::size_t fi = 0; fi < cfg.f_max.size(); ++fi) {
    const auto spec = sweep_network_spec(cfg, cfg.f_max[fi]);
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      // Same init/shuffle streams for every f_max, so only the grid differs.
      const std::uint64_t s = derive_seed(cfg.seed, r);
      PhysicalNetwork net(make_network(spec, s), TrainUnits{cfg.freq_unit_hz, 1.0});
      TrainConfig tc;
      tc.learning_rate = cfg.learning_rate;
      tc.epochs = cfg.epochs;
      tc.batch_size = cfg.batch_size;
      tc.seed = derive_seed(s, 1);
      train(net, train_set, nullptr, tc, on_epoch);
      SweepRow row;
      row.f_max = cfg.f_max[fi];
      row.repeat = r;
      row.train_acc = evaluate_accuracy(net, train_set);
      row.test_acc = evaluate_accuracy(net, test_set);
      const auto& m = net.model();
      const Matrix w = effective_weights(m.layer1, m.input_grid.centers());
      const std::size_t last = cfg.corr_last ? cfg.corr_last : w.cols() - 1;
      row.neighbor_corr = neighbor_weight_correlation(w, cfg.corr_first, last);
      rows.push_back(row);
      if (on_row) on_row(row);
    }
  }
  return rows;
}

BaselineResult run_software_baseline(const PixelData& data, std::size_t epochs,
                                     std::size_t batch_size, double learning_rate,
                                     std::uint64_t seed, const EpochCallback& on_epoch) {
  const auto train_set = labeled(data.train_x, data.train_y);
  const auto test_set = labeled(data.test_x, data.test_y);
  SoftwareNetwork net(make_software_model(784, 0, 10, derive_seed(seed, 0)));
  TrainConfig tc;
  tc.learning_rate = learning_rate;
  tc.epochs = epochs;
  tc.batch_size = batch_size;
  tc.seed = derive_seed(seed, 1);
  train(net, train_set, nullptr, tc, on_epoch);
  return {evaluate_accuracy(net, train_set), evaluate_accuracy(net, test_set)};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "f_max,repeat,train_acc,test_acc,neighbor_corr\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g\n", r.f_max, r.repeat,
                  r.train_acc, r.test_acc, r.neighbor_corr);
    os << buf;
  }
  return os.str();
}

}  // namespace spinrf
