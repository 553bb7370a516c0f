#pragma once

#include <cstddef>
#include <vector>

namespace spinrf {

// Equidistant, endpoint-inclusive grid of input frequency bins:
// f_i = f_min + i (f_max - f_min) / (n_bins - 1).
struct FrequencyGrid {
  double f_min = 0.0;  // Hz
  double f_max = 0.0;  // Hz
  std::size_t n_bins = 0;

  FrequencyGrid() = default;
  FrequencyGrid(double f_min_hz, double f_max_hz, std::size_t bins);

  void validate() const;
  double spacing() const noexcept { return (f_max - f_min) / static_cast<double>(n_bins - 1); }
  double center(std::size_t i) const noexcept;
  std::vector<double> centers() const;

  bool operator==(const FrequencyGrid&) const = default;
};

// Equidistant frequencies over [f_lo, f_hi]; a single frequency sits at f_lo.
std::vector<double> equidistant(double f_lo, double f_hi, std::size_t n);

}  // namespace spinrf
