#include "spadnet/inference.hpp"

#include <algorithm>
#include <string>

#include "spadnet/log.hpp"

namespace spadnet {
namespace {

std::vector<int> axis_origins(int len, int patch, int overlap) {
  std::vector<int> origins;
  const int stride = patch - overlap;
  for (int o = 0; o + patch < len; o += stride) origins.push_back(o);
  const int last = len - patch;
  if (origins.empty() || origins.back() != last) origins.push_back(last);
  return origins;
}

// Running weighted sum of tiles; voxels are normalized on finish().
class TileAccumulator {
 public:
  explicit TileAccumulator(const TilePlan& plan)
      : plan_(plan),
        sum_(Shape5{1, 1, plan.volume.frames, plan.volume.height, plan.volume.width}),
        weight_(sum_.shape()) {
    const auto& p = plan.patch;
    const auto& o = plan.overlap;
    for (int i = 0; i < p.frames; ++i) wt_.push_back(TilePlan::ramp(i, p.frames, o.frames));
    for (int i = 0; i < p.height; ++i) wy_.push_back(TilePlan::ramp(i, p.height, o.height));
    for (int i = 0; i < p.width; ++i) wx_.push_back(TilePlan::ramp(i, p.width, o.width));
  }

  void add(const Tile& tile) {
    const auto& p = plan_.patch;
    const Shape5 expected{1, 1, p.frames, p.height, p.width};
    if (tile.data.shape() != expected) {
      throw ShapeError("merge_tiles: tile shape " + tile.data.shape().str() +
                       " does not match plan patch " + expected.str());
    }
    const auto& org = tile.origin;
    if (org.frames < 0 || org.height < 0 || org.width < 0 ||
        org.frames + p.frames > plan_.volume.frames ||
        org.height + p.height > plan_.volume.height ||
        org.width + p.width > plan_.volume.width) {
      throw ShapeError("merge_tiles: tile lies outside the volume");
    }
    for (int t = 0; t < p.frames; ++t) {
      for (int y = 0; y < p.height; ++y) {
        const double wty = wt_[t] * wy_[y];
        for (int x = 0; x < p.width; ++x) {
          const double w = wty * wx_[x];
          const auto idx = sum_.offset(0, 0, org.frames + t, org.height + y, org.width + x);
          sum_[idx] += w * tile.data(0, 0, t, y, x);
          weight_[idx] += w;
        }
      }
    }
  }

  Tensor5 finish() && {
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      if (!(weight_[i] > 0.0)) {
        throw Error("merge_tiles: voxel " + std::to_string(i) + " is not covered by any tile");
      }
      sum_[i] /= weight_[i];
    }
    return std::move(sum_);
  }

 private:
  const TilePlan& plan_;
  Tensor5 sum_;
  Tensor5 weight_;
  std::vector<double> wt_, wy_, wx_;
};

}  // namespace

Extent3 TilePlan::origin(std::size_t index) const noexcept {
  const std::size_t nx = x_origins.size();
  const std::size_t ny = y_origins.size();
  return {t_origins[index / (ny * nx)], y_origins[(index / nx) % ny], x_origins[index % nx]};
}

double TilePlan::ramp(int i, int len, int overlap) noexcept {
  const double width = overlap + 1.0;
  return std::min({1.0, (i + 1) / width, (len - i) / width});
}

TilePlan plan_tiles(Extent3 volume, Extent3 patch, Extent3 overlap) {
  if (volume.frames < 1 || volume.height < 1 || volume.width < 1) {
    throw DomainError("plan_tiles: sequence dimensions must be positive");
  }
  if (patch.frames < 1 || patch.height < 1 || patch.width < 1) {
    throw DomainError("plan_tiles: patch dimensions must be positive");
  }
  if (overlap.frames < 0 || overlap.height < 0 || overlap.width < 0) {
    throw DomainError("plan_tiles: overlap must be >= 0");
  }
  TilePlan plan;
  plan.volume = volume;
  plan.patch = {std::min(patch.frames, volume.frames), std::min(patch.height, volume.height),
                std::min(patch.width, volume.width)};
  plan.overlap = {std::min(overlap.frames, plan.patch.frames - 1),
                  std::min(overlap.height, plan.patch.height - 1),
                  std::min(overlap.width, plan.patch.width - 1)};
  plan.t_origins = axis_origins(volume.frames, plan.patch.frames, plan.overlap.frames);
  plan.y_origins = axis_origins(volume.height, plan.patch.height, plan.overlap.height);
  plan.x_origins = axis_origins(volume.width, plan.patch.width, plan.overlap.width);
  return plan;
}

Tensor5 extract_tile(const Tensor5& volume, const TilePlan& plan, Extent3 origin) {
  const auto& p = plan.patch;
  Tensor5 tile(Shape5{1, 1, p.frames, p.height, p.width});
  for (int t = 0; t < p.frames; ++t) {
    for (int y = 0; y < p.height; ++y) {
      const double* src = volume.data() +
                          volume.offset(0, 0, origin.frames + t, origin.height + y, origin.width);
      std::copy(src, src + p.width, tile.data() + tile.offset(0, 0, t, y, 0));
    }
  }
  return tile;
}

Tensor5 merge_tiles(const std::vector<Tile>& tiles, const TilePlan& plan) {
  TileAccumulator acc(plan);
  for (const auto& tile : tiles) acc.add(tile);
  return std::move(acc).finish();
}

Tensor5 to_tensor(const FrameStack& frames) {
  const Extent3 e = extent_of(frames);
  if (e.frames == 0) throw DomainError("to_tensor: empty sequence");
  Tensor5 out(Shape5{1, 1, e.frames, e.height, e.width});
  for (int t = 0; t < e.frames; ++t) {
    auto v = frames[t].values();
    std::copy(v.begin(), v.end(), out.data() + out.offset(0, 0, t, 0, 0));
  }
  return out;
}

FrameStack to_frames(const Tensor5& tensor, int batch_index, int channel) {
  const auto& s = tensor.shape();
  FrameStack frames;
  frames.reserve(s.frames);
  for (int t = 0; t < s.frames; ++t) {
    Frame f(s.height, s.width);
    const double* src = tensor.data() + tensor.offset(batch_index, channel, t, 0, 0);
    std::copy(src, src + f.size(), f.values().begin());
    frames.push_back(std::move(f));
  }
  return frames;
}

FrameStack restore(const FrameStack& input, const NetworkWeights& weights,
                   const NetworkConfig& cfg, const TileOptions& tiles,
                   std::optional<int> expected_bits) {
  weights.check_against(cfg);
  const Extent3 extent = extent_of(input);
  if (extent.frames == 0) throw DomainError("restore: empty sequence");
  if (expected_bits && *expected_bits > 0) {
    try {
      const BitLevel found = detect_bit_level(input);
      if (found.bits() != *expected_bits) {
        log::warn("restore: input looks like " + std::to_string(found.bits()) +
                  "-bit data but the model was trained on " + std::to_string(*expected_bits) +
                  "-bit data");
      }
    } catch (const UnsupportedBitDepthError&) {
      log::warn("restore: input bit level could not be determined");
    }
  }

  const Tensor5 volume = to_tensor(input);
  const TilePlan plan = plan_tiles(extent, tiles.patch, tiles.overlap);
  TileAccumulator acc(plan);
  for (std::size_t i = 0; i < plan.tile_count(); ++i) {
    const Extent3 origin = plan.origin(i);
    acc.add(Tile{origin, predict(weights, cfg, extract_tile(volume, plan, origin))});
  }
  Tensor5 merged = std::move(acc).finish();
  for (double& v : merged.values()) v = std::clamp(v, 0.0, 1.0);
  return to_frames(merged);
}

}  // namespace spadnet
