#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spadnet/errors.hpp"

namespace spadnet {

/// Extents of a 5-axis tensor laid out (batch, channel, time, height, width),
/// width fastest.
struct Shape5 {
  int batch = 1;
  int channels = 1;
  int frames = 1;
  int height = 1;
  int width = 1;

  [[nodiscard]] std::size_t count() const noexcept {
    return static_cast<std::size_t>(batch) * channels * frames * height * width;
  }
  [[nodiscard]] std::size_t volume() const noexcept {
    return static_cast<std::size_t>(frames) * height * width;
  }
  [[nodiscard]] std::string str() const;

  friend bool operator==(const Shape5&, const Shape5&) = default;
};

class Tensor5 {
 public:
  Tensor5() = default;
  explicit Tensor5(Shape5 shape, double fill = 0.0);
  Tensor5(Shape5 shape, std::vector<double> data);

  [[nodiscard]] const Shape5& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] std::size_t offset(int n, int c, int t, int h, int w) const noexcept {
    return (((static_cast<std::size_t>(n) * shape_.channels + c) * shape_.frames + t) *
                shape_.height + h) * shape_.width + w;
  }

  double& operator()(int n, int c, int t, int h, int w) noexcept {
    return data_[offset(n, c, t, h, w)];
  }
  double operator()(int n, int c, int t, int h, int w) const noexcept {
    return data_[offset(n, c, t, h, w)];
  }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::span<double> values() noexcept { return data_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return data_; }
  [[nodiscard]] double* data() noexcept { return data_.data(); }
  [[nodiscard]] const double* data() const noexcept { return data_.data(); }

  /// Throws DomainError naming `what` if any value is NaN or infinite.
  void require_finite(const char* what) const;

  friend bool operator==(const Tensor5&, const Tensor5&) = default;

 private:
  Shape5 shape_{};
  std::vector<double> data_;
};

void require_same_shape(const Tensor5& a, const Tensor5& b, const char* what);

}  // namespace spadnet
