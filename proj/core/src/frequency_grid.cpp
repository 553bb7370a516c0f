#include "spinrf/frequency_grid.hpp"

#include <cmath>
#include <string>

#include "spinrf/errors.hpp"

namespace spinrf {

FrequencyGrid::FrequencyGrid(double f_min_hz, double f_max_hz, std::size_t bins)
    : f_min(f_min_hz), f_max(f_max_hz), n_bins(bins) {
  validate();
}

void FrequencyGrid::validate() const {
  if (!(f_min > 0.0) || !(f_max > f_min) || !std::isfinite(f_max)) {
    throw DomainError("FrequencyGrid: need 0 < f_min < f_max, got [" + std::to_string(f_min) +
                      ", " + std::to_string(f_max) + "]");
  }
  if (n_bins < 2) throw DomainError("FrequencyGrid: need at least 2 bins");
}

double FrequencyGrid::center(std::size_t i) const noexcept {
  if (i + 1 == n_bins) return f_max;
  return f_min + static_cast<double>(i) * spacing();
}

std::vector<double> FrequencyGrid::centers() const {
  std::vector<double> out(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) out[i] = center(i);
  return out;
}

std::vector<double> equidistant(double f_lo, double f_hi, std::size_t n) {
  std::vector<double> out(n, f_lo);
  if (n < 2) return out;
  const double step = (f_hi - f_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = f_lo + static_cast<double>(i) * step;
  out.back() = f_hi;
  return out;
}

}  // namespace spinrf
