#pragma once

#include <span>
#include <vector>

#include "spadnet/tensor.hpp"

namespace spadnet {

/// 3-D convolution kernel. `weights` is shaped
/// (C_out, C_in, k_t, k_h, k_w) and reuses Tensor5's axis order.
struct ConvKernel3 {
  Tensor5 weights;
  std::vector<double> bias;

  ConvKernel3() = default;
  ConvKernel3(int out_channels, int in_channels, int kt, int kh, int kw);

  [[nodiscard]] int out_channels() const noexcept { return weights.shape().batch; }
  [[nodiscard]] int in_channels() const noexcept { return weights.shape().channels; }
  [[nodiscard]] int kt() const noexcept { return weights.shape().frames; }
  [[nodiscard]] int kh() const noexcept { return weights.shape().height; }
  [[nodiscard]] int kw() const noexcept { return weights.shape().width; }

  /// Throws ShapeError unless all extents are odd and bias matches C_out.
  void validate() const;
};

enum class Padding { same, valid, replicate };

struct ConvGradients {
  Tensor5 input;  // empty when not requested
  Tensor5 weights;
  std::vector<double> bias;
};

/// Cross-correlation over (t, h, w) plus per-channel bias. `same` zero-pads
/// (k-1)/2 on each side; `replicate` pads by the same amount with copies of
/// the edge voxel; `valid` shrinks every axis by k-1.
Tensor5 conv3d_forward(const Tensor5& input, const ConvKernel3& kernel,
                       Padding padding = Padding::same);

/// Exact gradients of conv3d_forward with respect to input, weights and bias.
ConvGradients conv3d_backward(const Tensor5& input, const ConvKernel3& kernel,
                              const Tensor5& grad_output,
                              Padding padding = Padding::same,
                              bool want_input_grad = true);

Tensor5 leaky_relu(const Tensor5& input, double slope);
void leaky_relu_inplace(Tensor5& x, double slope);

/// `activation` may be the op's input or output: both have the same sign
/// for slope > 0. Zero takes the identity branch.
Tensor5 leaky_relu_backward(const Tensor5& activation, const Tensor5& grad_output,
                            double slope);

struct LossConfig {
  static constexpr double default_eta = 1e-3;
  double eta = default_eta;

  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  Tensor5 grad;  // d loss / d pred
};

/// Mean over elements of sqrt((pred - target)^2 + eta^2).
LossResult charbonnier(const Tensor5& pred, const Tensor5& target, const LossConfig& cfg);

Tensor5 elementwise_add(const Tensor5& a, const Tensor5& b);
void add_inplace(Tensor5& a, const Tensor5& b);

struct SgdConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;

  void validate() const;
};

/// Momentum buffers, one per parameter block; sized lazily on first step.
struct SgdState {
  std::vector<std::vector<double>> velocity;
};

/// v <- momentum * v + grad + weight_decay * param;  param <- param - lr * v.
void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads,
              const SgdConfig& cfg, SgdState& state);

}  // namespace spadnet
