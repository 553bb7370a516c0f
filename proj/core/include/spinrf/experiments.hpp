#pragma once

// End-to-end runs shared by the command-line tool and the acceptance suite:
// the 2D nonlinear tasks, the MNIST frequency-range sweep and its software
// baseline.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinrf/datasets.hpp"
#include "spinrf/network.hpp"
#include "spinrf/trainer.hpp"

namespace spinrf {

// ---- 2D tasks ----

struct Task2DConfig {
  std::size_t n_samples = 2000;     // 80 % train, 20 % test
  std::uint64_t data_seed = 1;
  std::uint64_t seed = 0;           // master seed for restarts
  std::size_t restarts = 12;        // independent inits; lowest training loss wins
  std::size_t epochs = 2000;
  std::size_t batch_size = 32;
  double learning_rate = 1e-5;
  double freq_unit_hz = 1e9;
  double g_m = 1e-2;                // A/V, hidden and output neurons
  double v_layer = 2.35e-3;         // V
  double jitter = 1e-3;             // bin spacings
  double hidden_f_lo = 1e9;
  double hidden_f_hi = 2e9;
  bool output_neuron = true;
  std::size_t grid_points = 46;     // per axis over [0.5, 5] uW

  void validate() const;
};

struct DecisionPoint {
  double p1 = 0.0;
  double p2 = 0.0;
  double output = 0.0;
  int predicted = 0;
};

struct Task2DResult {
  int task_id = 0;
  std::string name;
  std::size_t chosen_restart = 0;
  std::vector<double> restart_train_loss;  // final full-train-set MSE per restart
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  NetworkModel model;
  std::vector<DecisionPoint> grid;
};

NetworkSpec task2d_network_spec(const Task2DConfig& cfg);
Task2DResult run_task2d(int task_id, const Task2DConfig& cfg);

// ---- MNIST frequency sweep ----

struct SweepConfig {
  double f_min = 50e6;
  std::vector<double> f_max = {100e6, 500e6, 1e9, 5e9, 10e9, 20e9};
  std::size_t repeats = 1;
  std::size_t epochs = 20;
  std::size_t batch_size = 100;
  double learning_rate = 1e-5;
  double logit_scale = 1e-4;
  double freq_unit_hz = 1e9;
  double jitter = 0.25;
  std::uint64_t seed = 0;
  std::size_t corr_first = 0;  // column window for the neighbour-weight correlation
  std::size_t corr_last = 0;   // 0 -> all columns

  void validate() const;
};

struct SweepRow {
  double f_max = 0.0;
  std::size_t repeat = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double neighbor_corr = 0.0;  // of the trained layer
};

// Pixel data shared by every f_max; only the frequency grid changes.
struct PixelData {
  Matrix train_x, test_x;  // [n x 784], uW in [0, 1]
  std::vector<int> train_y, test_y;
};

PixelData load_mnist_pixels(const MnistFiles& files, std::size_t train_limit = 0,
                            std::size_t test_limit = 0);

NetworkSpec sweep_network_spec(const SweepConfig& cfg, double f_max);

using SweepRowCallback = std::function<void(const SweepRow&)>;
std::vector<SweepRow> run_freq_sweep(const PixelData& data, const SweepConfig& cfg,
                                     const SweepRowCallback& on_row = {},
                                     const EpochCallback& on_epoch = {});

struct BaselineResult {
  double train_acc = 0.0;
  double test_acc = 0.0;
};

// Single-layer (784 -> 10) software network, cross-entropy, Adam.
BaselineResult run_software_baseline(const PixelData& data, std::size_t epochs,
                                     std::size_t batch_size, double learning_rate,
                                     std::uint64_t seed, const EpochCallback& on_epoch = {});

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace spinrf
