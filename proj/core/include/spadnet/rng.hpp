#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace spadnet {

/// Counter-based Philox4x32-10 generator (Salmon et al., Random123).
///
/// A stream is identified by a 64-bit key (the seed) and a 64-bit stream id
/// that occupies the upper half of the 128-bit counter, so independent
/// streams are derived by `split` without any shared state. Identical
/// (seed, stream) pairs always produce identical draws.
class Rng {
 public:
  static constexpr std::string_view algorithm_name = "philox4x32-10";

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  /// Child generator whose stream is a deterministic function of this
  /// generator's identity and `child`. Does not advance this generator.
  [[nodiscard]] Rng split(std::uint64_t child) const noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Unbiased integer in [0, bound). `bound` must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

  /// Standard normal via Box-Muller (both variates are used).
  double normal() noexcept;

  bool coin(double p_true = 0.5) noexcept { return uniform() < p_true; }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

  /// Raw Philox4x32 bijection with 10 rounds; exposed for known-answer tests.
  static Block philox(Block counter, Key key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  Block buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace spadnet
