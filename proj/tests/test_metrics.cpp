#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "spadnet/metrics.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace spadnet {
namespace {

Frame random_frame(int h, int w, Rng& rng) {
  Frame f(h, w);
  for (double& v : f.values()) v = rng.uniform();
  return f;
}

TEST(Psnr, ClosedForms) {
  Rng rng(1);
  const Frame a = random_frame(16, 16, rng);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
  Frame b = a;
  for (double& v : b.values()) v += 0.1;
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-6);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
  EXPECT_NEAR(psnr(FrameStack{a, a}, FrameStack{b, b}), 20.0, 1e-6);
  EXPECT_THROW(psnr(a, Frame(16, 15)), ShapeError);
}

TEST(Psnr, DecreasesWithNoise) {
  Rng rng(2);
  const Frame a = random_frame(64, 64, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double sigma : {0.01, 0.05, 0.2}) {
    Frame b = a;
    for (double& v : b.values()) v += sigma * rng.normal();
    const double p = psnr(a, b);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Ssim, IdentityAndAnticorrelation) {
  Rng rng(3);
  const Frame a = random_frame(20, 24, rng);
  EXPECT_EQ(ssim(a, a), 1.0);
  Frame bits(20, 24), inv(20, 24);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits.values()[i] = rng.coin() ? 1.0 : 0.0;
    inv.values()[i] = 1.0 - bits.values()[i];
  }
  EXPECT_LE(ssim(bits, inv), 0.0);
  EXPECT_THROW(ssim(Frame(10, 30), Frame(10, 30)), DomainError);
}

TEST(Ssim, MatchesDirectImplementation) {
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const Frame a = random_frame(24 + i, 30 - i, rng);
    Frame b = a;
    for (double& v : b.values()) v = std::clamp(v + 0.15 * rng.normal(), 0.0, 1.0);
    const double fast = ssim(a, b);
    EXPECT_NEAR(fast, testing::direct_ssim(a, b), 1e-4);
    EXPECT_NEAR(fast, ssim(b, a), 1e-12);
  }
}

TEST(Ssim, SequenceIsFrameMean) {
  Rng rng(5);
  const FrameStack a{random_frame(16, 16, rng), random_frame(16, 16, rng)};
  const FrameStack b{random_frame(16, 16, rng), random_frame(16, 16, rng)};
  EXPECT_NEAR(ssim(a, b), (ssim(a[0], b[0]) + ssim(a[1], b[1])) / 2, 1e-15);
}

TEST(MedianFix, HandComputedCases) {
  const Frame flat(5, 5, 0.3);
  EXPECT_EQ(median_hot_pixel_fix(flat, Mask(5, 5, 0)), flat);

  Frame spike = flat;
  spike(2, 2) = 1.0;
  Mask one(5, 5, 0);
  one(2, 2) = 1;
  EXPECT_EQ(median_hot_pixel_fix(spike, one), flat);

  Frame f(3, 3);
  const double values[] = {1, 2, 3, 4, 99, 5, 6, 7, 8};
  for (int i = 0; i < 9; ++i) f.values()[i] = values[i];
  Mask centre(3, 3, 0);
  centre(1, 1) = 1;
  EXPECT_EQ(median_hot_pixel_fix(f, centre)(1, 1), 4.5);

  // Corner neighbourhood clips to {f(0,1), f(1,0), f(1,1)} minus masked.
  Mask corner(3, 3, 0);
  corner(0, 0) = 1;
  corner(1, 1) = 1;
  MedianFixReport report;
  const Frame fixed = median_hot_pixel_fix(f, corner, &report);
  EXPECT_EQ(fixed(0, 0), 3.0);  // median of {2, 4}
  EXPECT_EQ(fixed(1, 1), 5.0);  // median of {2,3,4,5,6,7,8}
  EXPECT_EQ(report.replaced, 2u);
  EXPECT_TRUE(report.unresolved.empty());
}

TEST(MedianFix, UnresolvedAndIdempotent) {
  Frame f(2, 2, 0.9);
  MedianFixReport report;
  const Frame out = median_hot_pixel_fix(f, Mask(2, 2, 1), &report);
  EXPECT_EQ(out, f);
  EXPECT_EQ(report.unresolved.size(), 4u);

  Rng rng(6);
  const Frame g = random_frame(12, 12, rng);
  Mask m(12, 12, 0);
  for (auto& v : m.values()) v = rng.coin(0.1) ? 1 : 0;
  const Frame once = median_hot_pixel_fix(g, m);
  EXPECT_EQ(median_hot_pixel_fix(once, m), once);
}

TEST(DetectHotPixels, ThresholdAndMinimumFrames) {
  FrameStack frames(100, Frame(4, 4, 0.5));
  for (auto& f : frames) f(1, 2) = 1.0;
  frames[0](3, 3) = 1.0;
  const Mask m = detect_hot_pixels(frames);
  EXPECT_EQ(m(1, 2), 1);
  EXPECT_EQ(m(3, 3), 0);
  EXPECT_EQ(std::count(m.values().begin(), m.values().end(), 1), 1);
  frames.pop_back();
  EXPECT_THROW(detect_hot_pixels(frames), DomainError);
}

TEST(Report, JsonShapeAndInfinity) {
  Rng rng(7);
  const FrameStack a{random_frame(12, 12, rng), random_frame(12, 12, rng)};
  FrameStack b = a;
  b[1](0, 0) = 1.0 - b[1](0, 0);
  const MetricReport r = evaluate(a, b);
  EXPECT_EQ(r.frames, 2);
  EXPECT_EQ(r.frame_psnr.size(), 2u);
  EXPECT_TRUE(std::isinf(r.frame_psnr[0]));
  const auto j = nlohmann::json::parse(report_to_string(r));
  EXPECT_EQ(j["frame_psnr_db"][0], "inf");
  EXPECT_NEAR(j["psnr_db"].get<double>(), r.psnr_db, 1e-9);
  testing::TempDir dir;
  write_report(dir / "r.json", r);
  EXPECT_TRUE(std::filesystem::exists(dir / "r.json"));
}

}  // namespace
}  // namespace spadnet
