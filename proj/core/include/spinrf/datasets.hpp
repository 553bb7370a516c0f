#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spinrf/frequency_grid.hpp"
#include "spinrf/matrix.hpp"
#include "spinrf/trainer.hpp"

namespace spinrf {

enum class Split { train, test };
const char* to_string(Split s) noexcept;

struct SpectrumSample {
  std::vector<double> powers;  // uW, one per grid bin
  int label = 0;
  Split split = Split::train;
  bool operator==(const SpectrumSample&) const = default;
};

struct SpectrumDataset {
  FrequencyGrid grid;
  std::size_t n_classes = 0;
  std::vector<SpectrumSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t count(Split s) const noexcept;
  // Shapes and labels; `require_unit_range` also checks powers lie in [0, 1] uW.
  void validate(bool require_unit_range = false) const;
  bool operator==(const SpectrumDataset&) const = default;
};

// Inputs and labels of one split.
LabeledData to_labeled(const SpectrumDataset& ds, Split split);
// All samples regardless of split.
LabeledData to_labeled(const SpectrumDataset& ds);

// Per-frequency mean over time frames of a [frames x bins] spectrogram.
std::vector<double> average_spectrogram(const Matrix& spectrogram);

// Global affine map of every power value so that the dataset minimum goes to
// 0 and the maximum to 1 uW. Throws DataError when all values are equal.
SpectrumDataset minmax_scale(const SpectrumDataset& ds);

// Spectra CSV:
//   '#' lines are comments;
//   first data line: f_min_hz,f_max_hz,n_bins,n_classes
//   then one line per sample: label,split,p_0,...,p_{n_bins-1}   (split = train|test)
SpectrumDataset load_spectra_csv(const std::filesystem::path& path);
void save_spectra_csv(const SpectrumDataset& ds, const std::filesystem::path& path);

// JSON sidecar describing how a dataset file was produced.
void write_provenance_json(const std::filesystem::path& path, const std::string& generator,
                           std::uint64_t seed, const SpectrumDataset& ds);

struct DroneSynthOptions {
  std::size_t n_classes = 10;
  std::size_t per_class = 100;
  std::uint64_t seed = 0;
  double train_fraction = 0.702;
  double amplitude_jitter = 0.10;  // multiplicative, uniform +-
  double noise = 0.01;             // additive Gaussian sigma, fraction of full scale
};

inline constexpr const char* kDroneSynthVersion = "drone-synth-1";

// Synthetic stand-in for the drone controller spectra: 256 bins over
// 20-120 MHz, one template per class (distinct occupied sub-bands and peak
// shapes) with per-sample jitter and noise, globally scaled to [0, 1] uW.
SpectrumDataset synth_drone_like(const DroneSynthOptions& opt);

// ---- MNIST ----

// IDX layout (big-endian): images magic 0x00000803, n, rows, cols, then
// n*rows*cols unsigned bytes row-major; labels magic 0x00000801, n, then n bytes.
struct IdxImages {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Matrix pixels;  // [n x rows*cols], raw byte values 0..255
};
IdxImages read_idx_images(const std::filesystem::path& path, std::size_t limit = 0);
std::vector<int> read_idx_labels(const std::filesystem::path& path, std::size_t limit = 0);
void write_idx_images(const std::filesystem::path& path, const IdxImages& images);
void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels);

// Pixel i (row-major) -> bin i of an equidistant 784-bin grid [f_min, f_max];
// intensities scaled to [0, 1] uW (values above 1 are taken as 0..255 bytes).
SpectrumDataset mnist_as_spectrum(const Matrix& images, const std::vector<int>& labels,
                                  Split split, double f_min = 50e6, double f_max = 5e9);

struct MnistFiles {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};
// Standard file names inside `dir`.
MnistFiles mnist_files(const std::filesystem::path& dir);

// Train and test splits combined into one dataset on the grid [f_min, f_max].
SpectrumDataset load_mnist_spectrum(const MnistFiles& files, double f_min, double f_max,
                                    std::size_t train_limit = 0, std::size_t test_limit = 0);

// ---- 2D tasks ----

inline constexpr double kTaskFreq1 = 220e6;
inline constexpr double kTaskFreq2 = 400e6;
inline constexpr double kTaskPowerMin = 0.5;  // uW
inline constexpr double kTaskPowerMax = 5.0;  // uW

// Class of the point (p1, p2) under task 1, 2 or 3:
//  1 corner quadrant: p1 > 1.8 and p2 > 1.8
//  2 diagonal band:   |p1 - p2| < 1.3
//  3 wedge:           0.6 < p2 / p1 < 1 / 0.6
int task2d_label(int task_id, double p1, double p2);
const char* task2d_name(int task_id);

// Uniform points in [0.5, 5]^2 uW on the two tones (220 MHz, 400 MHz).
// Samples are split 80/20 train/test.
SpectrumDataset make_task2d(int task_id, std::size_t n_samples, std::uint64_t seed);

}  // namespace spinrf
