#include <algorithm>
#include <cstdint>
#include <fstream>

#include "spinrf/datasets.hpp"
#include "spinrf/errors.hpp"

namespace spinrf {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw CorruptionError("idx: '" + path.string() + "' truncated header");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("idx: cannot open '" + path.string() + "'");
  return f;
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path, std::size_t limit) {
  auto f = open_in(path);
  if (read_be32(f, path) != kImagesMagic) {
    throw ParseError("idx: '" + path.string() + "' is not an IDX image file (bad magic)");
  }
  std::size_t n = read_be32(f, path);
  IdxImages img;
  img.rows = read_be32(f, path);
  img.cols = read_be32(f, path);
  if (limit && limit < n) n = limit;
  const std::size_t px = img.rows * img.cols;
  std::vector<unsigned char> buf(n * px);
  if (!f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw CorruptionError("idx: '" + path.string() + "' truncated pixel data");
  }
  img.pixels = Matrix(n, px);
  for (std::size_t i = 0; i < buf.size(); ++i) img.pixels.data()[i] = buf[i];
  return img;
}

std::vector<int> read_idx_labels(const std::filesystem::path& path, std::size_t limit) {
  auto f = open_in(path);
  if (read_be32(f, path) != kLabelsMagic) {
    throw ParseError("idx: '" + path.string() + "' is not an IDX label file (bad magic)");
  }
  std::size_t n = read_be32(f, path);
  if (limit && limit < n) n = limit;
  std::vector<unsigned char> buf(n);
  if (!f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n))) {
    throw CorruptionError("idx: '" + path.string() + "' truncated label data");
  }
  return {buf.begin(), buf.end()};
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& images) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("idx: cannot write '" + path.string() + "'");
  write_be32(f, kImagesMagic);
  write_be32(f, static_cast<std::uint32_t>(images.pixels.rows()));
  write_be32(f, static_cast<std::uint32_t>(images.rows));
  write_be32(f, static_cast<std::uint32_t>(images.cols));
  for (double v : images.pixels.flat()) {
    if (!(v >= 0.0 && v <= 255.0)) throw DomainError("idx: pixel outside 0..255");
    f.put(static_cast<char>(static_cast<unsigned char>(v)));
  }
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("idx: cannot write '" + path.string() + "'");
  write_be32(f, kLabelsMagic);
  write_be32(f, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) f.put(static_cast<char>(l));
}

SpectrumDataset mnist_as_spectrum(const Matrix& images, const std::vector<int>& labels,
                                  Split split, double f_min, double f_max) {
  constexpr std::size_t kPixels = 784;
  if (images.cols() != kPixels) {
    throw StructuralError("mnist_as_spectrum: expected 784 pixels per image, got " +
                          std::to_string(images.cols()));
  }
  if (images.rows() != labels.size()) {
    throw StructuralError("mnist_as_spectrum: image and label counts differ");
  }
  double max_v = 0.0;
  for (double v : images.flat()) {
    if (!(v >= 0.0 && v <= 255.0)) throw DomainError("mnist_as_spectrum: pixel outside 0..255");
    max_v = std::max(max_v, v);
  }
  const double scale = max_v > 1.0 ? 1.0 / 255.0 : 1.0;
  SpectrumDataset ds;
  ds.grid = FrequencyGrid(f_min, f_max, kPixels);
  ds.n_classes = 10;
  ds.samples.reserve(images.rows());
  for (std::size_t n = 0; n < images.rows(); ++n) {
    SpectrumSample s;
    s.label = labels[n];
    s.split = split;
    s.powers.resize(kPixels);
    auto row = images.row(n);
    for (std::size_t i = 0; i < kPixels; ++i) s.powers[i] = row[i] * scale;
    ds.samples.push_back(std::move(s));
  }
  ds.validate(true);
  return ds;
}

MnistFiles mnist_files(const std::filesystem::path& dir) {
  return {dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
          dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
}

SpectrumDataset load_mnist_spectrum(const MnistFiles& files, double f_min, double f_max,
                                    std::size_t train_limit, std::size_t test_limit) {
  const auto tr_img = read_idx_images(files.train_images, train_limit);
  const auto tr_lab = read_idx_labels(files.train_labels, train_limit);
  const auto te_img = read_idx_images(files.test_images, test_limit);
  const auto te_lab = read_idx_labels(files.test_labels, test_limit);
  SpectrumDataset ds = mnist_as_spectrum(tr_img.pixels, tr_lab, Split::train, f_min, f_max);
  SpectrumDataset te = mnist_as_spectrum(te_img.pixels, te_lab, Split::test, f_min, f_max);
  for (auto& s : te.samples) ds.samples.push_back(std::move(s));
  return ds;
}

}  // namespace spinrf
