#pragma once

#include <cstdint>
#include <filesystem>

#include "spadnet/network.hpp"

namespace spadnet {

/// Little-endian binary checkpoint. Layout (docs/formats.md):
///   magic "SPDNCKPT" | u32 version | u32 num_blocks | u32 channels |
///   u32 k_t | u32 k_h | u32 k_w | u32 intermediate_convs | u32 skip_mode | u32 border |
///   f64 leaky_slope | u32 trained_bits | u64 step | u64 value_count |
///   value_count x f32 (block, layer, weights then bias)
struct Checkpoint {
  NetworkConfig config;
  NetworkWeights weights;
  std::uint64_t step = 0;
  int trained_bits = 0;  // 0 when unknown
};

inline constexpr std::uint32_t checkpoint_version = 1;

/// Weights are narrowed to float32.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// As above, and throws ConfigMismatchError if the stored architecture
/// differs from `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const NetworkConfig& expected);

}  // namespace spadnet
