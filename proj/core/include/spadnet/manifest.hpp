#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spadnet/grid.hpp"
#include "spadnet/sensor_model.hpp"

namespace spadnet {

inline constexpr int manifest_schema_version = 1;

/// Where one clean sequence came from and how its degradation is seeded.
struct SequenceRecord {
  std::string source;
  int t0 = 0;
  int y0 = 0;
  int x0 = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SequenceRecord&, const SequenceRecord&) = default;
};

enum class SourceKind { directories, synthetic_gradient };

/// Everything needed to regenerate a dataset bit-for-bit.
struct DatasetManifest {
  int schema_version = manifest_schema_version;
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  SourceKind source_kind = SourceKind::directories;
  std::vector<std::string> sources;
  int downsample_factor = 7;
  Extent3 dims{64, 100, 100};
  int bit_level = 1;
  double hot_density = HotPixelSpec::default_density;
  HotPixelMode hot_mode = HotPixelMode::per_sequence_fixed;
  std::uint64_t hot_seed = 0;
  int train_count = 0;
  int test_count = 0;
  std::vector<SequenceRecord> sequences;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Test split size used when none is given: one in 25 (100 of 2500).
int default_test_count(int count) noexcept;

std::string manifest_to_string(const DatasetManifest& manifest);
/// Throws ParseError (with line/column) or VersionError.
DatasetManifest manifest_from_string(const std::string& text);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace spadnet
