#include "spadnet/tensor.hpp"

#include <cmath>

namespace spadnet {

std::string Shape5::str() const {
  return "(" + std::to_string(batch) + "," + std::to_string(channels) + "," +
         std::to_string(frames) + "," + std::to_string(height) + "," +
         std::to_string(width) + ")";
}

namespace {
void check_dims(const Shape5& s) {
  if (s.batch < 1 || s.channels < 1 || s.frames < 1 || s.height < 1 || s.width < 1) {
    throw ShapeError("tensor dimensions must be >= 1, got " + s.str());
  }
}
}  // namespace

Tensor5::Tensor5(Shape5 shape, double fill) : shape_(shape) {
  check_dims(shape_);
  data_.assign(shape_.count(), fill);
}

Tensor5::Tensor5(Shape5 shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  check_dims(shape_);
  if (data_.size() != shape_.count()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_.str());
  }
}

void Tensor5::require_finite(const char* what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite value");
  }
}

void require_same_shape(const Tensor5& a, const Tensor5& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

}  // namespace spadnet
