#include "spinrf/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "spinrf/errors.hpp"

namespace spinrf {

const char* to_string(Split s) noexcept { return s == Split::train ? "train" : "test"; }

std::size_t SpectrumDataset::count(Split s) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [s](const auto& x) { return x.split == s; }));
}

void SpectrumDataset::validate(bool require_unit_range) const {
  grid.validate();
  if (n_classes == 0) throw DataError("dataset: n_classes must be >= 1");
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const auto& s = samples[n];
    if (s.powers.size() != grid.n_bins) {
      throw StructuralError("dataset: sample " + std::to_string(n) + " has " +
                            std::to_string(s.powers.size()) + " bins, grid has " +
                            std::to_string(grid.n_bins));
    }
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= n_classes) {
      throw DataError("dataset: sample " + std::to_string(n) + " label out of range");
    }
    for (double p : s.powers) {
      if (!(p >= 0.0) || (require_unit_range && p > 1.0)) {
        throw DataError("dataset: sample " + std::to_string(n) + " power outside range");
      }
    }
  }
}

namespace {

LabeledData labeled_from(const SpectrumDataset& ds, bool all, Split split) {
  LabeledData d;
  d.n_classes = ds.n_classes;
  const std::size_t n = all ? ds.size() : ds.count(split);
  d.x = Matrix(n, ds.grid.n_bins);
  d.y.reserve(n);
  std::size_t r = 0;
  for (const auto& s : ds.samples) {
    if (!all && s.split != split) continue;
    std::copy(s.powers.begin(), s.powers.end(), d.x.row(r++).begin());
    d.y.push_back(s.label);
  }
  return d;
}

}  // namespace

LabeledData to_labeled(const SpectrumDataset& ds, Split split) {
  return labeled_from(ds, false, split);
}
LabeledData to_labeled(const SpectrumDataset& ds) { return labeled_from(ds, true, Split::train); }

std::vector<double> average_spectrogram(const Matrix& spectrogram) {
  if (spectrogram.empty()) throw DataError("average_spectrogram: empty spectrogram");
  std::vector<double> mean(spectrogram.cols(), 0.0);
  for (std::size_t t = 0; t < spectrogram.rows(); ++t) {
    auto row = spectrogram.row(t);
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (!(row[f] >= 0.0)) throw DomainError("average_spectrogram: negative entry");
      mean[f] += row[f];
    }
  }
  for (double& v : mean) v /= static_cast<double>(spectrogram.rows());
  return mean;
}

SpectrumDataset minmax_scale(const SpectrumDataset& ds) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : ds.samples) {
    for (double p : s.powers) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  if (!(hi > lo)) throw DataError("minmax_scale: dataset has fewer than two distinct values");
  SpectrumDataset out = ds;
  const double inv = 1.0 / (hi - lo);
  for (auto& s : out.samples) {
    for (double& p : s.powers) p = (p - lo) * inv;
  }
  return out;
}

// ---- CSV ----

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? line.npos
                                                                            : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
      f.remove_suffix(1);
    }
    out.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("spectra csv: bad number '" + std::string(s) + "'", line);
  }
  return v;
}

long long parse_int(std::string_view s, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    const double d = parse_double(s, line);
    if (d != std::floor(d)) throw ParseError("spectra csv: expected integer", line);
    return static_cast<long long>(d);
  }
  return v;
}

std::string fmt17(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

SpectrumDataset load_spectra_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open spectra file '" + path.string() + "'");
  SpectrumDataset ds;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::string_view sv(line);
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (sv.empty() || sv.front() == '#') continue;
    const auto fields = split_fields(sv);
    if (!have_header && !fields.empty() && fields[0] == "f_min_hz") continue;  // optional names row
    if (!have_header) {
      if (fields.size() != 4) {
        throw ParseError("spectra csv: header needs f_min_hz,f_max_hz,n_bins,n_classes", line_no);
      }
      const double f_min = parse_double(fields[0], line_no);
      const double f_max = parse_double(fields[1], line_no);
      const long long bins = parse_int(fields[2], line_no);
      const long long classes = parse_int(fields[3], line_no);
      if (bins < 2 || classes < 1 || !(f_min > 0.0) || !(f_max > f_min)) {
        throw ParseError("spectra csv: invalid header values", line_no);
      }
      ds.grid = FrequencyGrid(f_min, f_max, static_cast<std::size_t>(bins));
      ds.n_classes = static_cast<std::size_t>(classes);
      have_header = true;
      continue;
    }
    if (fields.size() != ds.grid.n_bins + 2) {
      throw ParseError("spectra csv: expected " + std::to_string(ds.grid.n_bins) +
                           " power values, got " +
                           std::to_string(fields.size() >= 2 ? fields.size() - 2 : 0),
                       line_no);
    }
    SpectrumSample s;
    const long long label = parse_int(fields[0], line_no);
    if (label < 0 || static_cast<std::size_t>(label) >= ds.n_classes) {
      throw ParseError("spectra csv: label " + std::to_string(label) + " out of range", line_no);
    }
    s.label = static_cast<int>(label);
    if (fields[1] == "train") {
      s.split = Split::train;
    } else if (fields[1] == "test") {
      s.split = Split::test;
    } else {
      throw ParseError("spectra csv: split must be 'train' or 'test'", line_no);
    }
    s.powers.reserve(ds.grid.n_bins);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const double p = parse_double(fields[i], line_no);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ParseError("spectra csv: power values must be finite and >= 0", line_no);
      }
      s.powers.push_back(p);
    }
    ds.samples.push_back(std::move(s));
  }
  if (!have_header) throw ParseError("spectra csv: missing header line", line_no);
  return ds;
}

void save_spectra_csv(const SpectrumDataset& ds, const std::filesystem::path& path) {
  ds.validate();
  std::ofstream f(path);
  if (!f) throw IoError("cannot write spectra file '" + path.string() + "'");
  f << "# f_min_hz,f_max_hz,n_bins,n_classes\n";
  f << fmt17(ds.grid.f_min) << ',' << fmt17(ds.grid.f_max) << ',' << ds.grid.n_bins << ','
    << ds.n_classes << '\n';
  f << "# label,split,p_0..p_" << ds.grid.n_bins - 1 << " (uW)\n";
  for (const auto& s : ds.samples) {
    f << s.label << ',' << to_string(s.split);
    for (double p : s.powers) f << ',' << fmt17(p);
    f << '\n';
  }
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

void write_provenance_json(const std::filesystem::path& path, const std::string& generator,
                           std::uint64_t seed, const SpectrumDataset& ds) {
  nlohmann::json j{{"generator", generator},
                   {"seed", seed},
                   {"f_min_hz", ds.grid.f_min},
                   {"f_max_hz", ds.grid.f_max},
                   {"n_bins", ds.grid.n_bins},
                   {"n_classes", ds.n_classes},
                   {"n_train", ds.count(Split::train)},
                   {"n_test", ds.count(Split::test)}};
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

// ---- synthetic drone-like spectra ----

namespace {

enum class BandShape { plateau, gaussian, comb, ramp };

struct Band {
  BandShape shape;
  double center;     // bin index
  double width;      // bins
  double amplitude;
  double period;     // comb spacing, bins
};

double band_value(const Band& b, double x) {
  const double u = (x - b.center) / b.width;
  switch (b.shape) {
    case BandShape::plateau: return b.amplitude / (1.0 + std::pow(std::abs(2.0 * u), 8.0));
    case BandShape::gaussian: return b.amplitude * std::exp(-0.5 * u * u * 9.0);
    case BandShape::comb: {
      if (std::abs(u) > 0.5) return 0.0;
      const double phase = std::fmod(std::abs(x - b.center), b.period);
      const double d = std::min(phase, b.period - phase);
      return b.amplitude * std::exp(-d * d / 0.5);
    }
    case BandShape::ramp:
      if (std::abs(u) > 0.5) return 0.0;
      return b.amplitude * (0.25 + 0.75 * (u + 0.5));
  }
  return 0.0;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> render(const std::vector<Band>& bands, std::size_t n_bins,
                           const std::vector<double>* gains = nullptr) {
  std::vector<double> out(n_bins, 0.0);
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const double g = gains ? (*gains)[k] : 1.0;
    for (std::size_t i = 0; i < n_bins; ++i) {
      out[i] += g * band_value(bands[k], static_cast<double>(i));
    }
  }
  return out;
}

}  // namespace

SpectrumDataset synth_drone_like(const DroneSynthOptions& opt) {
  if (opt.per_class < 2) throw DataError("synth_drone_like: per_class must be >= 2");
  if (opt.n_classes < 1) throw DataError("synth_drone_like: n_classes must be >= 1");
  constexpr std::size_t kBins = 256;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<Band>> templates;
  std::vector<std::vector<double>> rendered;
  while (templates.size() < opt.n_classes) {
    std::vector<Band> bands;
    const int n_bands = 1 + static_cast<int>(unit(rng) * 3.0);
    for (int k = 0; k < n_bands; ++k) {
      Band b;
      b.shape = static_cast<BandShape>(static_cast<int>(unit(rng) * 4.0) % 4);
      b.width = 6.0 + unit(rng) * 34.0;
      b.center = b.width / 2.0 + unit(rng) * (static_cast<double>(kBins) - b.width);
      b.amplitude = 0.3 + 0.7 * unit(rng);
      b.period = 2.0 + std::floor(unit(rng) * 4.0);
      bands.push_back(b);
    }
    auto r = render(bands, kBins);
    bool distinct = true;
    for (const auto& other : rendered) distinct &= pearson(r, other) < 0.5;
    if (!distinct) continue;
    templates.push_back(std::move(bands));
    rendered.push_back(std::move(r));
  }

  double full_scale = 0.0;
  for (const auto& r : rendered) full_scale = std::max(full_scale, *std::max_element(r.begin(), r.end()));

  SpectrumDataset ds;
  ds.grid = FrequencyGrid(20e6, 120e6, kBins);
  ds.n_classes = opt.n_classes;
  std::uniform_real_distribution<double> jitter(1.0 - opt.amplitude_jitter,
                                                1.0 + opt.amplitude_jitter);
  std::normal_distribution<double> noise(0.0, opt.noise * full_scale);
  const double floor_level = 0.02 * full_scale;
  for (std::size_t n = 0; n < opt.per_class; ++n) {
    for (std::size_t c = 0; c < opt.n_classes; ++c) {
      std::vector<double> gains(templates[c].size());
      for (double& g : gains) g = jitter(rng);
      auto p = render(templates[c], kBins, &gains);
      for (double& v : p) v = std::max(0.0, v + floor_level + noise(rng));
      ds.samples.push_back({std::move(p), static_cast<int>(c), Split::train});
    }
  }
  std::vector<std::size_t> order(ds.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(opt.train_fraction * static_cast<double>(ds.samples.size())));
  for (std::size_t r = n_train; r < order.size(); ++r) ds.samples[order[r]].split = Split::test;
  return minmax_scale(ds);
}

}  // namespace spinrf
