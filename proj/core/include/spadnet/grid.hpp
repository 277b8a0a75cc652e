#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spadnet/errors.hpp"

namespace spadnet {

/// Dense row-major 2-D grid (one video frame).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, T fill = T{})
      : height_(height), width_(width) {
    if (height <= 0 || width <= 0) {
      throw DomainError("grid dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(int row, int col) noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  const T& operator()(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  [[nodiscard]] std::span<T> values() noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return data_; }

  [[nodiscard]] bool same_shape(const Grid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

using Frame = Grid<double>;
using BitFrame = Grid<std::uint8_t>;
using Mask = Grid<std::uint8_t>;

/// Ordered frames sharing one H x W.
using FrameStack = std::vector<Frame>;

/// Temporal/spatial extent of a sequence or patch.
struct Extent3 {
  int frames = 0;
  int height = 0;
  int width = 0;

  friend bool operator==(const Extent3&, const Extent3&) = default;
};

/// Throws ShapeError unless all frames share one shape; returns that extent.
Extent3 extent_of(const FrameStack& frames);

}  // namespace spadnet
