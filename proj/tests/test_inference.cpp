#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "spadnet/inference.hpp"
#include "spadnet/log.hpp"
#include "support/oracles.hpp"

namespace spadnet {
namespace {

FrameStack random_stack(Extent3 e, Rng& rng) {
  FrameStack frames(e.frames, Frame(e.height, e.width));
  for (auto& f : frames)
    for (double& v : f.values()) v = rng.uniform();
  return frames;
}

std::vector<int> coverage(const TilePlan& plan) {
  const Extent3 v = plan.volume;
  std::vector<int> count(static_cast<std::size_t>(v.frames) * v.height * v.width, 0);
  for (std::size_t i = 0; i < plan.tile_count(); ++i) {
    const Extent3 o = plan.origin(i);
    for (int t = 0; t < plan.patch.frames; ++t)
      for (int y = 0; y < plan.patch.height; ++y)
        for (int x = 0; x < plan.patch.width; ++x)
          ++count[((static_cast<std::size_t>(o.frames + t) * v.height) + o.height + y) * v.width +
                  o.width + x];
  }
  return count;
}

TEST(PlanTiles, Examples) {
  const TilePlan one = plan_tiles({38, 60, 60}, {38, 60, 60}, {8, 10, 10});
  EXPECT_EQ(one.tile_count(), 1u);
  EXPECT_EQ(one.origin(0), (Extent3{0, 0, 0}));

  const TilePlan p = plan_tiles({38, 100, 60}, {38, 60, 60}, {8, 10, 10});
  EXPECT_EQ(p.y_origins, (std::vector<int>{0, 40}));
  EXPECT_EQ(p.x_origins, (std::vector<int>{0}));

  const TilePlan clamped = plan_tiles({10, 20, 30}, {38, 60, 60}, {8, 10, 10});
  EXPECT_EQ(clamped.patch, (Extent3{10, 20, 30}));
  EXPECT_EQ(clamped.tile_count(), 1u);

  EXPECT_THROW(plan_tiles({0, 10, 10}, {4, 4, 4}, {1, 1, 1}), DomainError);
  EXPECT_THROW(plan_tiles({4, 10, 10}, {4, 0, 4}, {1, 1, 1}), DomainError);
}

TEST(PlanTiles, CoversEveryVoxel) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Extent3 vol{1 + static_cast<int>(rng.uniform_index(20)),
                      1 + static_cast<int>(rng.uniform_index(30)),
                      1 + static_cast<int>(rng.uniform_index(30))};
    const Extent3 patch{1 + static_cast<int>(rng.uniform_index(12)),
                        1 + static_cast<int>(rng.uniform_index(16)),
                        1 + static_cast<int>(rng.uniform_index(16))};
    const Extent3 overlap{static_cast<int>(rng.uniform_index(6)),
                          static_cast<int>(rng.uniform_index(8)),
                          static_cast<int>(rng.uniform_index(8))};
    const TilePlan plan = plan_tiles(vol, patch, overlap);
    const auto cov = coverage(plan);
    EXPECT_GE(*std::min_element(cov.begin(), cov.end()), 1);
    for (std::size_t i = 0; i < plan.tile_count(); ++i) {
      const Extent3 o = plan.origin(i);
      EXPECT_LE(o.frames + plan.patch.frames, vol.frames);
      EXPECT_LE(o.height + plan.patch.height, vol.height);
      EXPECT_LE(o.width + plan.patch.width, vol.width);
    }
  }
}

TEST(Ramp, ProfileShape) {
  EXPECT_EQ(TilePlan::ramp(0, 10, 0), 1.0);
  EXPECT_DOUBLE_EQ(TilePlan::ramp(0, 20, 3), 0.25);
  EXPECT_DOUBLE_EQ(TilePlan::ramp(2, 20, 3), 0.75);
  EXPECT_EQ(TilePlan::ramp(10, 20, 3), 1.0);
  EXPECT_DOUBLE_EQ(TilePlan::ramp(19, 20, 3), 0.25);
  for (int i = 0; i < 20; ++i) EXPECT_GT(TilePlan::ramp(i, 20, 8), 0.0);
}

TEST(MergeTiles, SingleTileAndConstants) {
  Rng rng(2);
  const Tensor5 x = to_tensor(random_stack({4, 6, 6}, rng));
  const TilePlan one = plan_tiles({4, 6, 6}, {4, 6, 6}, {1, 1, 1});
  EXPECT_EQ(merge_tiles({Tile{{0, 0, 0}, x}}, one), x);

  const TilePlan plan = plan_tiles({4, 10, 6}, {4, 6, 6}, {0, 3, 0});
  std::vector<Tile> tiles;
  for (std::size_t i = 0; i < plan.tile_count(); ++i) {
    tiles.push_back({plan.origin(i), Tensor5({1, 1, 4, 6, 6}, 0.3)});
  }
  const Tensor5 merged = merge_tiles(tiles, plan);
  for (double v : merged.values()) EXPECT_NEAR(v, 0.3, 1e-15);
  tiles.pop_back();
  EXPECT_ANY_THROW(merge_tiles(tiles, plan));
}

TEST(MergeTiles, IdentityRoundTrip) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Extent3 vol{2 + static_cast<int>(rng.uniform_index(14)),
                      3 + static_cast<int>(rng.uniform_index(20)),
                      3 + static_cast<int>(rng.uniform_index(20))};
    const Extent3 patch{1 + static_cast<int>(rng.uniform_index(8)),
                        2 + static_cast<int>(rng.uniform_index(10)),
                        2 + static_cast<int>(rng.uniform_index(10))};
    const Extent3 overlap{static_cast<int>(rng.uniform_index(4)),
                          static_cast<int>(rng.uniform_index(5)),
                          static_cast<int>(rng.uniform_index(5))};
    const Tensor5 x = to_tensor(random_stack(vol, rng));
    const TilePlan plan = plan_tiles(vol, patch, overlap);
    std::vector<Tile> tiles;
    for (std::size_t i = 0; i < plan.tile_count(); ++i) {
      tiles.push_back({plan.origin(i), extract_tile(x, plan, plan.origin(i))});
    }
    const Tensor5 y = merge_tiles(tiles, plan);
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(y[i], x[i], 1e-12);
  }
}

TEST(Restore, ZeroWeightsIsIdentity) {
  NetworkConfig cfg;
  cfg.num_blocks = 2;
  cfg.channels = 3;
  Rng rng(4);
  const FrameStack x = random_stack({9, 14, 17}, rng);
  const FrameStack y = restore(x, zero_weights(cfg), cfg, TileOptions{{5, 8, 8}, {2, 3, 3}});
  ASSERT_EQ(extent_of(y), extent_of(x));
  for (std::size_t t = 0; t < x.size(); ++t)
    for (std::size_t i = 0; i < x[t].size(); ++i) EXPECT_NEAR(y[t].values()[i], x[t].values()[i], 1e-12);
}

TEST(Restore, ClampsAndKeepsShape) {
  NetworkConfig cfg;
  cfg.num_blocks = 1;
  cfg.channels = 2;
  NetworkWeights w = zero_weights(cfg);
  w.blocks[0].layers.back().bias[0] = 0.7;  // shift everything up
  Rng rng(5);
  const FrameStack x = random_stack({4, 8, 8}, rng);
  const FrameStack y = restore(x, w, cfg, TileOptions{{4, 5, 5}, {1, 2, 2}});
  ASSERT_EQ(extent_of(y), extent_of(x));
  for (const auto& f : y)
    for (double v : f.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  EXPECT_EQ(y[0](0, 0), std::min(1.0, x[0](0, 0) + 0.7));
}

TEST(Restore, ShiftedGridAgreesOnInterior) {
  NetworkConfig cfg;
  cfg.num_blocks = 1;
  cfg.channels = 2;
  Rng rng(6);
  const FrameStack x = random_stack({12, 24, 24}, rng);
  const auto a = restore(x, zero_weights(cfg), cfg, TileOptions{{6, 10, 10}, {2, 4, 4}});
  const auto b = restore(x, zero_weights(cfg), cfg, TileOptions{{7, 11, 11}, {2, 4, 4}});
  for (std::size_t t = 1; t + 1 < x.size(); ++t)
    for (int r = 1; r < 23; ++r)
      for (int c = 1; c < 23; ++c) EXPECT_NEAR(a[t](r, c), b[t](r, c), 1e-6);
}

TEST(Restore, BitLevelMismatchOnlyWarns) {
  NetworkConfig cfg;
  cfg.num_blocks = 1;
  cfg.channels = 2;
  FrameStack x(3, Frame(6, 6, 0.0));
  x[1](2, 2) = 1.0;
  log::set_quiet(true);
  EXPECT_NO_THROW(restore(x, zero_weights(cfg), cfg, TileOptions{{3, 6, 6}, {0, 0, 0}}, 3));
  log::set_quiet(false);
  NetworkConfig other = cfg;
  other.channels = 3;
  EXPECT_THROW(restore(x, zero_weights(cfg), other), ConfigMismatchError);
}

TEST(TensorConversion, RoundTrip) {
  Rng rng(7);
  const FrameStack x = random_stack({3, 4, 5}, rng);
  const Tensor5 t = to_tensor(x);
  EXPECT_EQ(t.shape(), (Shape5{1, 1, 3, 4, 5}));
  EXPECT_EQ(to_frames(t), x);
}

}  // namespace
}  // namespace spadnet
