#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "spadnet/tensor_ops.hpp"

namespace spadnet {

/// Where each residual block's skip connection comes from.
///  cascade:   block k refines u_{k-1}: u_k = u_{k-1} + branch_k(u_{k-1})
///  raw_input: branches still chain, but every skip adds the network input:
///             u_k = x + branch_k(u_{k-1})
enum class SkipMode : std::uint32_t { cascade = 0, raw_input = 1 };

std::string_view to_string(SkipMode mode) noexcept;
SkipMode skip_mode_from_string(std::string_view name);

/// Boundary handling of every network convolution (both keep T, H, W).
enum class BorderMode : std::uint32_t { zero = 0, replicate = 1 };

std::string_view to_string(BorderMode mode) noexcept;
BorderMode border_mode_from_string(std::string_view name);

struct NetworkConfig {
  int num_blocks = 3;
  int channels = 60;
  int kernel_t = 3;
  int kernel_h = 3;
  int kernel_w = 3;
  double leaky_slope = 0.1;
  int intermediate_convs = 3;
  SkipMode skip_mode = SkipMode::cascade;
  BorderMode border = BorderMode::zero;

  /// input conv + intermediates + output conv
  [[nodiscard]] int convs_per_block() const noexcept { return intermediate_convs + 2; }
  [[nodiscard]] Padding padding() const noexcept {
    return border == BorderMode::zero ? Padding::same : Padding::replicate;
  }
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct ResidualBlockWeights {
  std::vector<ConvKernel3> layers;  // input, intermediates..., output
};

struct NetworkWeights {
  std::vector<ResidualBlockWeights> blocks;

  /// Every weight and bias buffer in a fixed order (block, layer, weights, bias).
  [[nodiscard]] std::vector<std::span<double>> parameters();
  [[nodiscard]] std::vector<std::span<const double>> parameters() const;
  [[nodiscard]] std::size_t parameter_count() const;

  /// Throws ConfigMismatchError unless layer shapes follow `cfg`.
  void check_against(const NetworkConfig& cfg) const;

  friend bool operator==(const NetworkWeights& a, const NetworkWeights& b);
};

/// All-zero weights and biases with the shapes implied by `cfg`.
NetworkWeights zero_weights(const NetworkConfig& cfg);

/// Zero-mean Gaussian kernels with variance 2 / fan_in, zero biases. Values
/// are rounded to float32 so checkpoints reproduce them exactly.
NetworkWeights init_weights(const NetworkConfig& cfg, std::uint64_t seed);

/// Per-block estimates u_1..u_K, each shaped like the network input.
struct BlockOutputs {
  std::vector<Tensor5> estimates;
};

/// Activations retained for the backward pass.
struct ForwardTrace {
  Tensor5 input;
  struct Block {
    Tensor5 branch_input;
    std::vector<Tensor5> activations;  // post-LReLU output of each hidden conv
  };
  std::vector<Block> blocks;
  BlockOutputs outputs;
};

BlockOutputs forward(const NetworkWeights& weights, const NetworkConfig& cfg,
                     const Tensor5& input);

ForwardTrace forward_traced(const NetworkWeights& weights, const NetworkConfig& cfg,
                            const Tensor5& input);

/// Final estimate u_K only.
Tensor5 predict(const NetworkWeights& weights, const NetworkConfig& cfg,
                const Tensor5& input);

/// Gradients of a scalar loss given d loss / d u_k for every block.
/// Gradient flows through the cascade; nothing is detached.
NetworkWeights backward(const NetworkWeights& weights, const NetworkConfig& cfg,
                        const ForwardTrace& trace,
                        std::span<const Tensor5> grad_estimates);

struct MultiBlockLoss {
  double loss = 0.0;
  std::vector<Tensor5> grad_estimates;
};

/// Sum over blocks of the mean Charbonnier penalty against `target`.
MultiBlockLoss multi_block_loss(const BlockOutputs& outputs, const Tensor5& target,
                                const LossConfig& cfg);

struct LossAndGradients {
  double loss = 0.0;
  NetworkWeights gradients;
};

LossAndGradients loss_and_gradients(const NetworkWeights& weights,
                                    const NetworkConfig& cfg, const Tensor5& input,
                                    const Tensor5& target, const LossConfig& loss_cfg);

}  // namespace spadnet
