#include "spinrf/hyper_search.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "spinrf/trainer.hpp"

namespace spinrf {

void HyperSearchSpace::validate() const {
  auto check = [](const SearchRange& r, bool log_scale, const char* name) {
    if (!(r.hi >= r.lo) || (log_scale && !(r.lo > 0.0))) {
      throw ConfigError(std::string("hyper search: invalid range for ") + name);
    }
  };
  check(learning_rate, true, "learning_rate");
  check(g_m, true, "g_m");
  check(v_layer, false, "v_layer");
  if (n_trials < 1) throw ConfigError("hyper search: n_trials must be >= 1");
  if (objective_repeats < 1) throw ConfigError("hyper search: objective_repeats must be >= 1");
}

namespace {

double draw_log(const SearchRange& r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(r.lo), std::log(r.hi));
  const double v = std::exp(u(rng));
  return r.lo == r.hi ? r.lo : v;
}

double draw_lin(const SearchRange& r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(r.lo, r.hi);
  const double v = u(rng);
  return r.lo == r.hi ? r.lo : v;
}

}  // namespace

std::vector<HyperParams> draw_trials(const HyperSearchSpace& space) {
  space.validate();
  std::mt19937_64 rng(space.seed);
  std::vector<HyperParams> out(space.n_trials);
  for (auto& p : out) {
    p.learning_rate = draw_log(space.learning_rate, rng);
    p.g_m = draw_log(space.g_m, rng);
    p.v_layer = draw_lin(space.v_layer, rng);
  }
  return out;
}

HyperSearchResult hyper_search(const HyperSearchSpace& space, const ObjectiveFn& objective) {
  const auto configs = draw_trials(space);
  HyperSearchResult result;
  bool any_ok = false;
  for (std::size_t t = 0; t < configs.size(); ++t) {
    TrialRecord rec;
    rec.trial = t;
    rec.params = configs[t];
    try {
      for (std::size_t r = 0; r < space.objective_repeats; ++r) {
        const double acc = objective(rec.params, derive_seed(space.seed, t * 1000003ULL + r));
        if (!std::isfinite(acc)) throw NumericError("objective returned a non-finite accuracy");
        rec.accuracies.push_back(acc);
      }
      rec.mean_accuracy = std::accumulate(rec.accuracies.begin(), rec.accuracies.end(), 0.0) /
                          static_cast<double>(rec.accuracies.size());
      if (!any_ok || rec.mean_accuracy > result.best_mean_accuracy) {
        result.best = rec.params;
        result.best_mean_accuracy = rec.mean_accuracy;
        result.best_trial = t;
        any_ok = true;
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    result.trials.push_back(std::move(rec));
  }
  if (!any_ok) throw SearchFailed("hyper search: every trial failed", result.trials);
  return result;
}

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trials) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f.precision(17);
  f << "trial,learning_rate,g_m,v_layer,mean_accuracy,failed\n";
  for (const auto& t : trials) {
    f << t.trial << ',' << t.params.learning_rate << ',' << t.params.g_m << ','
      << t.params.v_layer << ',' << t.mean_accuracy << ',' << (t.failed ? 1 : 0) << '\n';
  }
}

void write_trials_json(const std::filesystem::path& path, const HyperSearchResult& result) {
  using nlohmann::json;
  json trials = json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"trial", t.trial},
                      {"learning_rate", t.params.learning_rate},
                      {"g_m", t.params.g_m},
                      {"v_layer", t.params.v_layer},
                      {"accuracies", t.accuracies},
                      {"mean_accuracy", t.mean_accuracy},
                      {"failed", t.failed},
                      {"error", t.error}});
  }
  json j{{"best",
          {{"trial", result.best_trial},
           {"learning_rate", result.best.learning_rate},
           {"g_m", result.best.g_m},
           {"v_layer", result.best.v_layer},
           {"mean_accuracy", result.best_mean_accuracy}}},
         {"trials", trials}};
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << j.dump(2) << "\n";
}

}  // namespace spinrf
