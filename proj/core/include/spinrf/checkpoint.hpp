#pragma once

// Binary model checkpoints. Layout (all integers little-endian):
//
//   offset  size  field
//   0       8     magic "SPINRFCK"
//   8       4     u32 format version (kCheckpointVersion)
//   12      8     u64 header length H
//   20      H     UTF-8 JSON header: kind, units, constants, metadata and the
//                 ordered list of arrays {name, rows, cols}
//   20+H    8*N   raw IEEE-754 binary64 values of every array, little-endian,
//                 row-major, concatenated in header order
//   end-32  32    SHA-256 of every preceding byte
//
// docs/checkpoint_format.md has the header schema.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spinrf/network.hpp"
#include "spinrf/software_network.hpp"

namespace spinrf {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct RawArray {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

struct RawCheckpoint {
  std::string header_json;     // without the "arrays" list, which is derived from `arrays`
  std::vector<RawArray> arrays;
};

void write_raw_checkpoint(const std::filesystem::path& path, const RawCheckpoint& raw);
RawCheckpoint read_raw_checkpoint(const std::filesystem::path& path);

void save_checkpoint(const NetworkModel& model, const std::filesystem::path& path);
void save_checkpoint(const EquivalentSoftwareModel& model, const std::filesystem::path& path);

// "physical" or "software".
std::string checkpoint_kind(const std::filesystem::path& path);

NetworkModel load_checkpoint(const std::filesystem::path& path);
EquivalentSoftwareModel load_software_checkpoint(const std::filesystem::path& path);

}  // namespace spinrf
