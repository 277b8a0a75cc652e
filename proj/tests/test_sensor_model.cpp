#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spadnet/log.hpp"
#include "spadnet/sensor_model.hpp"

namespace spadnet {
namespace {

TEST(PoissonPmf, ClosedFormCases) {
  EXPECT_EQ(poisson_pmf(0.0, 0), 1.0);
  EXPECT_EQ(poisson_pmf(0.0, 3), 0.0);
  EXPECT_NEAR(poisson_pmf(1.0, 1), 0.36787944117144232160, 1e-15);
  EXPECT_NEAR(poisson_pmf(5.0, 3), 0.14037389581428056451, 1e-15);
  // log-space branch (k > 20)
  EXPECT_NEAR(poisson_pmf(30.0, 25) / 0.05111533742894132155, 1.0, 1e-12);
}

TEST(PoissonPmf, Normalizes) {
  double total = 0.0;
  for (long k = 0; k <= 200; ++k) total += poisson_pmf(5.0, k);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PoissonPmf, RejectsNegativeArguments) {
  EXPECT_THROW(poisson_pmf(-0.1, 0), DomainError);
  EXPECT_THROW(poisson_pmf(1.0, -1), DomainError);
}

TEST(DetectionProbability, Values) {
  EXPECT_EQ(detection_probability(0.0), 0.0);
  EXPECT_NEAR(detection_probability(std::log(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(detection_probability(1.0), 0.63212055882855767840, 1e-15);
  EXPECT_THROW(detection_probability(-1.0), DomainError);
}

TEST(DetectionProbability, MatchesComplementOfZeroCount) {
  for (double chi : {0.0, 0.01, 0.5, 1.0, 5.0, 20.0}) {
    EXPECT_NEAR(1.0 - poisson_pmf(chi, 0), detection_probability(chi), 1e-12) << chi;
  }
}

TEST(ExpectedCounts, LinearPhotonBudget) {
  SensorConfig zero{0.0, 0.0, 0.3, 1e-6};
  EXPECT_EQ(expected_counts(zero, 0.0), 0.0);
  SensorConfig cfg{1e6, 100.0, 0.5, 1e-5};
  EXPECT_NEAR(expected_counts(cfg, 1.0), 5.001, 1e-12);
  SensorConfig doubled = cfg;
  doubled.gate_time *= 2;
  EXPECT_NEAR(expected_counts(doubled, 0.7), 2 * expected_counts(cfg, 0.7), 1e-12);
  EXPECT_THROW(expected_counts(SensorConfig{1.0, 0.0, 1.5, 1.0}, 1.0), DomainError);
  EXPECT_THROW(expected_counts(SensorConfig{1.0, 0.0, 0.5, 0.0}, 1.0), DomainError);
  EXPECT_THROW(expected_counts(cfg, -1.0), DomainError);
}

TEST(ExpectedCounts, DetectionMonotoneInRadiance) {
  SensorConfig cfg{2e5, 50.0, 0.4, 1e-5};
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double p = detection_probability(expected_counts(cfg, i * 0.05));
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(SampleBinaryFrame, ExtremesAndDeterminism) {
  Rng rng(1);
  EXPECT_EQ(sample_binary_frame(Frame(8, 9, 0.0), rng), BitFrame(8, 9, 0));
  EXPECT_EQ(sample_binary_frame(Frame(8, 9, 1.0), rng), BitFrame(8, 9, 1));
  Rng a(5), b(5);
  const Frame f(16, 16, 0.3);
  EXPECT_EQ(sample_binary_frame(f, a), sample_binary_frame(f, b));
  Frame bad(2, 2, 0.5);
  bad(1, 1) = 1.01;
  EXPECT_THROW(sample_binary_frame(bad, rng), DomainError);
}

TEST(SampleBinaryFrame, MeanWithinBinomialBound) {
  Rng rng(2024);
  const BitFrame bits = sample_binary_frame(Frame(1000, 1000, 0.5), rng);
  double sum = 0;
  for (auto v : bits.values()) sum += v;
  const double mean = sum / 1e6;
  EXPECT_GE(mean, 0.4985);
  EXPECT_LE(mean, 0.5015);
}

TEST(BitLevel, FramesPerSample) {
  EXPECT_EQ(BitLevel(1).frames_per_sample(), 1);
  EXPECT_EQ(BitLevel(2).frames_per_sample(), 3);
  EXPECT_EQ(BitLevel(3).frames_per_sample(), 7);
  EXPECT_EQ(BitLevel(4).frames_per_sample(), 15);
  EXPECT_THROW(BitLevel(0), UnsupportedBitDepthError);
  EXPECT_THROW(BitLevel(5), UnsupportedBitDepthError);
}

BinarySequence history(std::initializer_list<int> bits) {
  BinarySequence s;
  for (int b : bits) s.frames.push_back(BitFrame(1, 1, static_cast<std::uint8_t>(b)));
  return s;
}

TEST(AccumulateBits, Examples) {
  const auto seq = history({1, 0, 1, 1});
  const auto one = accumulate_bits(seq, BitLevel(1));
  ASSERT_EQ(one.frames.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(one.frames[i](0, 0), seq.frames[i](0, 0));

  log::set_quiet(true);
  const auto two = accumulate_bits(seq, BitLevel(2));  // trailing frame dropped
  log::set_quiet(false);
  ASSERT_EQ(two.frames.size(), 1u);
  EXPECT_EQ(two.frames[0](0, 0), 2.0 / 3.0);

  BinarySequence ones;
  for (int i = 0; i < 15; ++i) ones.frames.push_back(BitFrame(3, 3, 1));
  const auto four = accumulate_bits(ones, BitLevel(4));
  ASSERT_EQ(four.frames.size(), 1u);
  EXPECT_EQ(four.frames[0], Frame(3, 3, 1.0));

  EXPECT_THROW(accumulate_bits(BinarySequence{}, BitLevel(1)), DomainError);
}

TEST(AccumulateBits, LevelSetIsExactlyKOverN) {
  for (int b = 1; b <= 4; ++b) {
    const BitLevel level(b);
    const int n = level.frames_per_sample();
    // Enumerate every count 0..n at distinct pixels.
    BinarySequence seq;
    for (int t = 0; t < n; ++t) {
      BitFrame f(1, n + 1);
      for (int k = 0; k <= n; ++k) f(0, k) = t < k ? 1 : 0;
      seq.frames.push_back(f);
    }
    const auto q = accumulate_bits(seq, level);
    std::set<double> values(q.frames[0].values().begin(), q.frames[0].values().end());
    const auto levels = level.levels();
    EXPECT_EQ(values, std::set<double>(levels.begin(), levels.end())) << "b=" << b;
  }
}

TEST(HotPixels, DensityZeroIsIdentity) {
  QuantizedSequence q{FrameStack(3, Frame(10, 10, 0.25)), BitLevel(2)};
  EXPECT_EQ(inject_hot_pixels(q, HotPixelSpec{0.0, 1, HotPixelMode::per_sequence_fixed}).frames,
            q.frames);
}

TEST(HotPixels, ExactCountAndFixedSites) {
  QuantizedSequence q{FrameStack(4, Frame(100, 100, 0.0)), BitLevel(1)};
  const auto out = inject_hot_pixels(q, HotPixelSpec{0.01, 77, HotPixelMode::per_sequence_fixed});
  std::set<std::size_t> first;
  for (std::size_t t = 0; t < out.frames.size(); ++t) {
    std::set<std::size_t> sites;
    auto v = out.frames[t].values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) {
        EXPECT_EQ(v[i], 1.0);
        sites.insert(i);
      }
    }
    EXPECT_EQ(sites.size(), 100u);
    if (t == 0) first = sites;
    EXPECT_EQ(sites, first);
  }
}

TEST(HotPixels, PerFrameModeMovesSites) {
  QuantizedSequence q{FrameStack(2, Frame(50, 50, 0.0)), BitLevel(1)};
  const auto out = inject_hot_pixels(q, HotPixelSpec{0.02, 3, HotPixelMode::per_frame_random});
  EXPECT_NE(out.frames[0], out.frames[1]);
  const auto masks = hot_pixel_masks({2, 50, 50}, HotPixelSpec{0.02, 3, HotPixelMode::per_frame_random});
  for (int t = 0; t < 2; ++t) {
    for (std::size_t i = 0; i < masks[t].size(); ++i) {
      EXPECT_EQ(masks[t].values()[i] == 1, out.frames[t].values()[i] == 1.0);
    }
  }
}

TEST(HotPixels, DensityBound) {
  EXPECT_THROW((HotPixelSpec{0.06, 0, HotPixelMode::per_sequence_fixed}.validate()), DomainError);
}

TEST(DetectBitLevel, Examples) {
  EXPECT_EQ(detect_bit_level({Frame(2, 2, 0.0), Frame(2, 2, 1.0)}).bits(), 1);
  Frame f(1, 4);
  f(0, 0) = 0.0;
  f(0, 1) = 1.0 / 3;
  f(0, 2) = 2.0 / 3;
  f(0, 3) = 1.0;
  EXPECT_EQ(detect_bit_level({f}).bits(), 2);
  Frame half(1, 2);
  half(0, 1) = 0.5;
  EXPECT_THROW(detect_bit_level({half}), UnsupportedBitDepthError);
  EXPECT_THROW(detect_bit_level({}), DomainError);
}

TEST(DetectBitLevel, InvertsAccumulation) {
  Rng rng(99);
  for (int b = 1; b <= 4; ++b) {
    const BitLevel level(b);
    Frame intensity(16, 16);
    for (double& v : intensity.values()) v = rng.uniform();
    BinarySequence seq;
    for (int t = 0; t < level.frames_per_sample() * 4; ++t) {
      seq.frames.push_back(sample_binary_frame(intensity, rng));
    }
    const auto q = accumulate_bits(seq, level);
    EXPECT_EQ(detect_bit_level(q.frames).bits(), b);
    // A saturated hot pixel does not change the answer.
    const auto hot = inject_hot_pixels(q, HotPixelSpec{0.01, 1, HotPixelMode::per_sequence_fixed});
    EXPECT_EQ(detect_bit_level(hot.frames).bits(), b);
  }
}

}  // namespace
}  // namespace spadnet
