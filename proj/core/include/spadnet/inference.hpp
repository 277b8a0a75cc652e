#pragma once

#include <optional>
#include <vector>

#include "spadnet/network.hpp"
#include "spadnet/sensor_model.hpp"

namespace spadnet {

/// Overlapping tiling of a (T, H, W) volume.
struct TilePlan {
  Extent3 volume;
  Extent3 patch;    // clamped to `volume`
  Extent3 overlap;  // clamped below `patch`
  std::vector<int> t_origins;
  std::vector<int> y_origins;
  std::vector<int> x_origins;

  [[nodiscard]] std::size_t tile_count() const noexcept {
    return t_origins.size() * y_origins.size() * x_origins.size();
  }
  /// Origin of the i-th tile in (t, y, x) lexicographic order.
  [[nodiscard]] Extent3 origin(std::size_t index) const noexcept;

  /// Blend weight of local coordinate `i` along an axis of length `len` with
  /// `overlap` ramp width: min(1, (i+1)/(overlap+1), (len-i)/(overlap+1)).
  [[nodiscard]] static double ramp(int i, int len, int overlap) noexcept;
};

struct TileOptions {
  Extent3 patch{38, 60, 60};
  Extent3 overlap{8, 10, 10};
};

/// Origins at multiples of (patch - overlap); the last tile on each axis is
/// snapped so it ends at the boundary.
TilePlan plan_tiles(Extent3 volume, Extent3 patch, Extent3 overlap);

/// Cut the tile at `origin` (plan.patch sized) out of a (1,1,T,H,W) tensor.
Tensor5 extract_tile(const Tensor5& volume, const TilePlan& plan, Extent3 origin);

struct Tile {
  Extent3 origin;
  Tensor5 data;  // (1, 1, patch.frames, patch.height, patch.width)
};

/// Weighted average of overlapping tiles with separable linear-ramp weights.
Tensor5 merge_tiles(const std::vector<Tile>& tiles, const TilePlan& plan);

/// Tiles, runs the network (final block estimate only), merges and clamps to
/// [0,1]. A bit-level mismatch with `expected_bits` logs a warning.
FrameStack restore(const FrameStack& input, const NetworkWeights& weights,
                   const NetworkConfig& cfg, const TileOptions& tiles = {},
                   std::optional<int> expected_bits = std::nullopt);

/// (1, 1, T, H, W) view of a frame stack and back.
Tensor5 to_tensor(const FrameStack& frames);
FrameStack to_frames(const Tensor5& tensor, int batch_index = 0, int channel = 0);

}  // namespace spadnet
