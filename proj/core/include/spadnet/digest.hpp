#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "spadnet/grid.hpp"

namespace spadnet {

/// 64-bit FNV-1a, used to compare regenerated artifacts.
class Digest {
 public:
  void update(std::span<const std::uint8_t> bytes) noexcept;
  void update(const Frame& frame) noexcept;
  void update(const FrameStack& frames) noexcept;
  [[nodiscard]] std::uint64_t value() const noexcept { return state_; }
  [[nodiscard]] std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace spadnet
