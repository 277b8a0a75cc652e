#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spadnet/manifest.hpp"
#include "spadnet/rng.hpp"
#include "spadnet/sensor_model.hpp"

namespace spadnet {

/// Noise-free reference sequence with values in [0,1].
struct CleanSequence {
  FrameStack frames;
  std::string provenance;
};

/// Raw frames of one source video, already normalized to [0,1].
struct VideoSource {
  std::string id;
  FrameStack frames;
};

struct TrainingPair {
  QuantizedSequence input;
  CleanSequence target;
  BitLevel bit_level{1};
};

struct PatchSpec {
  int depth = 38;
  int height = 60;
  int width = 60;

  /// Depth must give every block at least one full temporal context:
  /// depth >= 2 * num_blocks * 3 + 1.
  void validate(int num_blocks) const;
  [[nodiscard]] Extent3 extent() const noexcept { return {depth, height, width}; }
};

struct CleanBuildOptions {
  int factor = 7;
  int count = 2500;
  Extent3 dims{64, 100, 100};
  std::uint64_t seed = 0;
};

struct CleanBuild {
  std::vector<CleanSequence> sequences;
  DatasetManifest manifest;
};

/// Non-overlapping factor x factor box average; trailing rows/cols that do
/// not fill a box are dropped.
Frame box_downsample(const Frame& frame, int factor);

/// Box-downsamples every source, then cuts `count` random windows of `dims`.
/// Sources too short or too small are skipped with a warning.
CleanBuild build_clean_sequences(const std::vector<VideoSource>& sources,
                                 const CleanBuildOptions& options);

/// Loads each directory with read_frames (color converted to luma).
CleanBuild build_clean_sequences(const std::vector<std::filesystem::path>& source_dirs,
                                 const CleanBuildOptions& options);

/// Synthetic clips of a constant level plus a slow linear ramp in t, y and x.
/// Values stay inside [0.1, 0.9].
std::vector<CleanSequence> make_gradient_clips(int count, Extent3 dims,
                                               std::uint64_t seed);

/// Draws N_b binary frames per clean frame, averages them and injects hot
/// pixels. The target is the clean sequence unchanged.
TrainingPair synthesize_pair(const CleanSequence& clean, BitLevel level,
                             const HotPixelSpec& hot, Rng& rng);

/// Co-located random window of `spec` from input and target.
TrainingPair sample_patch(const TrainingPair& pair, const PatchSpec& spec, Rng& rng);

struct AugmentParams {
  static constexpr double scale_choices[] = {0.8, 0.9, 1.0, 1.1, 1.25};

  double scale = 1.0;
  bool flip_horizontal = false;
  bool flip_vertical = false;
  int rotate_quarters = 0;  // counter-clockwise multiples of 90 degrees
};

/// Independent coin flips for resize, both flips and rotation. Quarter turns
/// are limited to {0, 2} when the patch is not square.
AugmentParams draw_augmentation(Rng& rng, bool square);

/// Applies the same transform to input and target. Resized frames are
/// center-cropped or edge-padded back to the original size and the input is
/// re-quantized to its bit level.
TrainingPair apply_augmentation(const TrainingPair& pair, const AugmentParams& params);

TrainingPair augment(const TrainingPair& pair, Rng& rng);

/// Rebuilds every pair a manifest describes. `sources` must hold the videos
/// named in the manifest (ignored for synthetic manifests).
std::vector<TrainingPair> generate_dataset(const DatasetManifest& manifest,
                                           const std::vector<VideoSource>& sources = {});

/// Creates a manifest with per-sequence seeds for the synthetic gradient task.
DatasetManifest make_synthetic_manifest(int count, Extent3 dims, BitLevel level,
                                        const HotPixelSpec& hot, std::uint64_t seed);

}  // namespace spadnet
