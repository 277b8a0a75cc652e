#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "spadnet/grid.hpp"
#include "spadnet/rng.hpp"

namespace spadnet {

/// Photon-budget parameters of a gated SPAD pixel.
struct SensorConfig {
  double impinging_rate = 0.0;   // photons / s at unit radiance
  double dark_count_rate = 0.0;  // counts / s
  double pde = 1.0;              // photon detection efficiency, [0,1]
  double gate_time = 1.0;        // s, > 0

  void validate() const;
};

/// Bit depth b of an accumulated sequence; N_b = 2^b - 1 binary frames
/// are averaged per output frame.
class BitLevel {
 public:
  static constexpr int min_bits = 1;
  static constexpr int max_bits = 4;

  explicit BitLevel(int bits);

  [[nodiscard]] int bits() const noexcept { return bits_; }
  [[nodiscard]] int frames_per_sample() const noexcept { return (1 << bits_) - 1; }

  /// The N_b + 1 admissible values k / N_b in ascending order.
  [[nodiscard]] std::vector<double> levels() const;

  /// Nearest admissible value to `v` (v clamped to [0,1] first).
  [[nodiscard]] double quantize(double v) const noexcept;

  friend bool operator==(const BitLevel&, const BitLevel&) = default;

 private:
  int bits_;
};

struct BinarySequence {
  std::vector<BitFrame> frames;
  double frame_period = 0.0;  // seconds; metadata only
};

struct QuantizedSequence {
  FrameStack frames;
  BitLevel bit_level{1};
};

enum class HotPixelMode { per_sequence_fixed, per_frame_random };

struct HotPixelSpec {
  static constexpr double max_density = 0.05;
  static constexpr double default_density = 0.002;

  double density = default_density;
  std::uint64_t seed = 0;
  HotPixelMode mode = HotPixelMode::per_sequence_fixed;

  void validate() const;
};

std::string_view to_string(HotPixelMode mode) noexcept;
HotPixelMode hot_pixel_mode_from_string(std::string_view name);

/// Probability of k counts for a Poisson variable with mean chi.
/// Evaluated in log space for k > 20.
double poisson_pmf(double chi, long k);

/// P(count > 0) = 1 - exp(-chi).
double detection_probability(double chi);

/// Expected counts per gate: (radiance * rate * pde + dcr) * gate_time.
double expected_counts(const SensorConfig& config, double radiance);

/// One binary readout: pixel is 1 iff a uniform draw falls below its
/// intensity. Draws are taken in row-major order from `rng`.
BitFrame sample_binary_frame(const Frame& intensity, Rng& rng);

/// Averages consecutive groups of N_b binary frames. Trailing frames that do
/// not complete a group are dropped (a warning is logged).
QuantizedSequence accumulate_bits(const BinarySequence& seq, BitLevel level);

/// Row-major pixel indices of the hot sites used for `frame_index`. The set
/// has exactly round(density * height * width) distinct entries.
std::vector<std::size_t> hot_pixel_sites(int height, int width,
                                         const HotPixelSpec& spec,
                                         std::size_t frame_index);

/// Saturates hot sites to 1.0.
QuantizedSequence inject_hot_pixels(const QuantizedSequence& seq,
                                    const HotPixelSpec& spec);

/// Per-frame masks of the sites `inject_hot_pixels` touches.
std::vector<Mask> hot_pixel_masks(const Extent3& extent, const HotPixelSpec& spec);

/// Smallest b in 1..4 whose level grid k/N_b explains every value to 1e-9.
/// Throws UnsupportedBitDepthError if none does.
BitLevel detect_bit_level(const FrameStack& frames);

inline constexpr double level_match_tolerance = 1e-9;

}  // namespace spadnet
