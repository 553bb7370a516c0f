#include <cmath>
#include <random>

#include "spinrf/datasets.hpp"
#include "spinrf/errors.hpp"

namespace spinrf {

int task2d_label(int task_id, double p1, double p2) {
  switch (task_id) {
    case 1: return (p1 > 1.8 && p2 > 1.8) ? 1 : 0;
    case 2: return std::abs(p1 - p2) < 1.3 ? 1 : 0;
    case 3: return (p2 > 0.6 * p1 && p1 > 0.6 * p2) ? 1 : 0;
    default: break;
  }
  throw DomainError("task2d: task id must be 1, 2 or 3");
}

const char* task2d_name(int task_id) {
  switch (task_id) {
    case 1: return "corner_quadrant";
    case 2: return "diagonal_band";
    case 3: return "wedge";
    default: break;
  }
  throw DomainError("task2d: task id must be 1, 2 or 3");
}

SpectrumDataset make_task2d(int task_id, std::size_t n_samples, std::uint64_t seed) {
  task2d_name(task_id);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(kTaskPowerMin, kTaskPowerMax);
  SpectrumDataset ds;
  ds.grid = FrequencyGrid(kTaskFreq1, kTaskFreq2, 2);
  ds.n_classes = 2;
  const std::size_t n_train = n_samples * 4 / 5;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double p1 = u(rng);
    const double p2 = u(rng);
    ds.samples.push_back(
        {{p1, p2}, task2d_label(task_id, p1, p2), n < n_train ? Split::train : Split::test});
  }
  return ds;
}

}  // namespace spinrf
