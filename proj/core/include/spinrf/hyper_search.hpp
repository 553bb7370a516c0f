#pragma once

// Seeded random search over the training hyperparameters. Each trial draws a
// configuration, runs the objective `objective_repeats` times with derived
// seeds, and scores the mean validation accuracy.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "spinrf/errors.hpp"

namespace spinrf {

struct SearchRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct HyperSearchSpace {
  SearchRange learning_rate{1e-6, 1e-1};  // log-uniform
  SearchRange g_m{1e-4, 1e-2};            // A/V, log-uniform
  SearchRange v_layer{0.0, 0.03};         // V, uniform
  std::size_t n_trials = 100;
  std::size_t objective_repeats = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct HyperParams {
  double learning_rate = 0.0;
  double g_m = 0.0;
  double v_layer = 0.0;
};

struct TrialRecord {
  std::size_t trial = 0;
  HyperParams params;
  std::vector<double> accuracies;
  double mean_accuracy = 0.0;
  bool failed = false;
  std::string error;
};

struct HyperSearchResult {
  HyperParams best;
  double best_mean_accuracy = 0.0;
  std::size_t best_trial = 0;
  std::vector<TrialRecord> trials;
};

// Validation accuracy of one training run with the given hyperparameters.
using ObjectiveFn = std::function<double(const HyperParams&, std::uint64_t run_seed)>;

class SearchFailed : public Error {
 public:
  SearchFailed(const std::string& what, std::vector<TrialRecord> trials)
      : Error(what), trials_(std::move(trials)) {}
  const std::vector<TrialRecord>& trials() const noexcept { return trials_; }

 private:
  std::vector<TrialRecord> trials_;
};

// The i-th configuration drawn for `space` (independent of the objective).
std::vector<HyperParams> draw_trials(const HyperSearchSpace& space);

// Argmax of mean accuracy over trials; ties keep the earliest trial. A trial
// whose objective throws is logged as failed. Throws SearchFailed when every
// trial fails.
HyperSearchResult hyper_search(const HyperSearchSpace& space, const ObjectiveFn& objective);

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trials);
void write_trials_json(const std::filesystem::path& path, const HyperSearchResult& result);

}  // namespace spinrf
