#include "spadnet/network.hpp"

#include <cmath>
#include <string>

#include "spadnet/rng.hpp"

namespace spadnet {

std::string_view to_string(SkipMode mode) noexcept {
  return mode == SkipMode::cascade ? "cascade" : "raw-input";
}

SkipMode skip_mode_from_string(std::string_view name) {
  if (name == "cascade") return SkipMode::cascade;
  if (name == "raw-input") return SkipMode::raw_input;
  throw DomainError("unknown skip mode '" + std::string(name) + "'");
}

std::string_view to_string(BorderMode mode) noexcept {
  return mode == BorderMode::zero ? "zero" : "replicate";
}

BorderMode border_mode_from_string(std::string_view name) {
  if (name == "zero") return BorderMode::zero;
  if (name == "replicate") return BorderMode::replicate;
  throw DomainError("unknown border mode '" + std::string(name) + "'");
}

void NetworkConfig::validate() const {
  if (num_blocks < 1) throw DomainError("num_blocks must be >= 1");
  if (channels < 1) throw DomainError("channels must be >= 1");
  if (intermediate_convs < 0) throw DomainError("intermediate_convs must be >= 0");
  for (int k : {kernel_t, kernel_h, kernel_w}) {
    if (k < 1 || k % 2 == 0) throw DomainError("kernel extents must be odd and >= 1");
  }
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw DomainError("leaky_slope must lie in (0,1)");
  }
}

namespace {

Shape5 layer_shape(const NetworkConfig& cfg, int layer) {
  const int last = cfg.convs_per_block() - 1;
  const int in = layer == 0 ? 1 : cfg.channels;
  const int out = layer == last ? 1 : cfg.channels;
  return {out, in, cfg.kernel_t, cfg.kernel_h, cfg.kernel_w};
}

}  // namespace

std::vector<std::span<double>> NetworkWeights::parameters() {
  std::vector<std::span<double>> out;
  for (auto& block : blocks) {
    for (auto& layer : block.layers) {
      out.emplace_back(layer.weights.values());
      out.emplace_back(layer.bias);
    }
  }
  return out;
}

std::vector<std::span<const double>> NetworkWeights::parameters() const {
  std::vector<std::span<const double>> out;
  for (const auto& block : blocks) {
    for (const auto& layer : block.layers) {
      out.emplace_back(layer.weights.values());
      out.emplace_back(layer.bias);
    }
  }
  return out;
}

std::size_t NetworkWeights::parameter_count() const {
  std::size_t n = 0;
  for (auto p : parameters()) n += p.size();
  return n;
}

void NetworkWeights::check_against(const NetworkConfig& cfg) const {
  if (blocks.size() != static_cast<std::size_t>(cfg.num_blocks)) {
    throw ConfigMismatchError("weights have " + std::to_string(blocks.size()) +
                              " blocks, config expects " + std::to_string(cfg.num_blocks));
  }
  for (const auto& block : blocks) {
    if (block.layers.size() != static_cast<std::size_t>(cfg.convs_per_block())) {
      throw ConfigMismatchError("block layer count does not match config");
    }
    for (int l = 0; l < cfg.convs_per_block(); ++l) {
      const auto& layer = block.layers[l];
      if (layer.weights.shape() != layer_shape(cfg, l) ||
          layer.bias.size() != static_cast<std::size_t>(layer_shape(cfg, l).batch)) {
        throw ConfigMismatchError("layer " + std::to_string(l) + " has shape " +
                                  layer.weights.shape().str() + ", config expects " +
                                  layer_shape(cfg, l).str());
      }
    }
  }
}

bool operator==(const NetworkWeights& a, const NetworkWeights& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    const auto& la = a.blocks[k].layers;
    const auto& lb = b.blocks[k].layers;
    if (la.size() != lb.size()) return false;
    for (std::size_t l = 0; l < la.size(); ++l) {
      if (!(la[l].weights == lb[l].weights) || la[l].bias != lb[l].bias) return false;
    }
  }
  return true;
}

NetworkWeights zero_weights(const NetworkConfig& cfg) {
  cfg.validate();
  NetworkWeights w;
  w.blocks.resize(cfg.num_blocks);
  for (auto& block : w.blocks) {
    for (int l = 0; l < cfg.convs_per_block(); ++l) {
      const Shape5 s = layer_shape(cfg, l);
      block.layers.emplace_back(s.batch, s.channels, s.frames, s.height, s.width);
    }
  }
  return w;
}

NetworkWeights init_weights(const NetworkConfig& cfg, std::uint64_t seed) {
  NetworkWeights w = zero_weights(cfg);
  const Rng root(seed);
  for (std::size_t k = 0; k < w.blocks.size(); ++k) {
    for (std::size_t l = 0; l < w.blocks[k].layers.size(); ++l) {
      auto& layer = w.blocks[k].layers[l];
      const auto& s = layer.weights.shape();
      const double fan_in = static_cast<double>(s.channels) * s.frames * s.height * s.width;
      const double stddev = std::sqrt(2.0 / fan_in);
      Rng rng = root.split(k * 1024 + l);
      for (double& v : layer.weights.values()) {
        v = static_cast<double>(static_cast<float>(stddev * rng.normal()));
      }
    }
  }
  return w;
}

namespace {

void check_input(const NetworkWeights& weights, const NetworkConfig& cfg, const Tensor5& input) {
  cfg.validate();
  weights.check_against(cfg);
  if (input.shape().channels != 1) {
    throw ShapeError("network input must have exactly one channel, got " +
                     input.shape().str());
  }
}

}  // namespace

ForwardTrace forward_traced(const NetworkWeights& weights, const NetworkConfig& cfg,
                            const Tensor5& input) {
  check_input(weights, cfg, input);
  ForwardTrace trace;
  trace.input = input;
  trace.blocks.resize(cfg.num_blocks);
  const int last = cfg.convs_per_block() - 1;
  for (int k = 0; k < cfg.num_blocks; ++k) {
    auto& tb = trace.blocks[k];
    tb.branch_input = k == 0 ? input : trace.outputs.estimates.back();
    const auto& layers = weights.blocks[k].layers;
    Tensor5 z;
    for (int l = 0; l <= last; ++l) {
      const Tensor5& a = l == 0 ? tb.branch_input : tb.activations.back();
      z = conv3d_forward(a, layers[l], cfg.padding());
      if (l < last) {
        leaky_relu_inplace(z, cfg.leaky_slope);
        tb.activations.push_back(std::move(z));
      }
    }
    add_inplace(z, cfg.skip_mode == SkipMode::cascade ? tb.branch_input : input);
    trace.outputs.estimates.push_back(std::move(z));
  }
  return trace;
}

BlockOutputs forward(const NetworkWeights& weights, const NetworkConfig& cfg,
                     const Tensor5& input) {
  check_input(weights, cfg, input);
  BlockOutputs out;
  const int last = cfg.convs_per_block() - 1;
  for (int k = 0; k < cfg.num_blocks; ++k) {
    const Tensor5& branch_input = k == 0 ? input : out.estimates.back();
    const auto& layers = weights.blocks[k].layers;
    Tensor5 a = conv3d_forward(branch_input, layers[0], cfg.padding());
    for (int l = 1; l <= last; ++l) {
      leaky_relu_inplace(a, cfg.leaky_slope);
      a = conv3d_forward(a, layers[l], cfg.padding());
    }
    add_inplace(a, cfg.skip_mode == SkipMode::cascade ? branch_input : input);
    out.estimates.push_back(std::move(a));
  }
  return out;
}

Tensor5 predict(const NetworkWeights& weights, const NetworkConfig& cfg, const Tensor5& input) {
  auto out = forward(weights, cfg, input);
  return std::move(out.estimates.back());
}

NetworkWeights backward(const NetworkWeights& weights, const NetworkConfig& cfg,
                        const ForwardTrace& trace, std::span<const Tensor5> grad_estimates) {
  if (grad_estimates.size() != static_cast<std::size_t>(cfg.num_blocks)) {
    throw ShapeError("backward: need one gradient per block estimate");
  }
  NetworkWeights grads = zero_weights(cfg);
  const int last = cfg.convs_per_block() - 1;
  Tensor5 carry;  // d loss / d u_k arriving from block k+1
  for (int k = cfg.num_blocks - 1; k >= 0; --k) {
    Tensor5 g_u = grad_estimates[k];
    require_same_shape(g_u, trace.outputs.estimates[k], "backward");
    if (carry.size() != 0) add_inplace(g_u, carry);

    const auto& tb = trace.blocks[k];
    const auto& layers = weights.blocks[k].layers;
    Tensor5 g = g_u;
    Tensor5 grad_branch_input;
    for (int l = last; l >= 0; --l) {
      const Tensor5& a_in = l == 0 ? tb.branch_input : tb.activations[l - 1];
      const bool need_input = l > 0 || k > 0;
      ConvGradients cg = conv3d_backward(a_in, layers[l], g, cfg.padding(), need_input);
      grads.blocks[k].layers[l].weights = std::move(cg.weights);
      grads.blocks[k].layers[l].bias = std::move(cg.bias);
      if (l > 0) {
        g = leaky_relu_backward(tb.activations[l - 1], cg.input, cfg.leaky_slope);
      } else if (need_input) {
        grad_branch_input = std::move(cg.input);
      }
    }
    if (k > 0) {
      carry = std::move(grad_branch_input);
      if (cfg.skip_mode == SkipMode::cascade) add_inplace(carry, g_u);
    }
  }
  return grads;
}

MultiBlockLoss multi_block_loss(const BlockOutputs& outputs, const Tensor5& target,
                                const LossConfig& cfg) {
  MultiBlockLoss result;
  for (const auto& estimate : outputs.estimates) {
    auto r = charbonnier(estimate, target, cfg);
    result.loss += r.loss;
    result.grad_estimates.push_back(std::move(r.grad));
  }
  return result;
}

LossAndGradients loss_and_gradients(const NetworkWeights& weights, const NetworkConfig& cfg,
                                    const Tensor5& input, const Tensor5& target,
                                    const LossConfig& loss_cfg) {
  const ForwardTrace trace = forward_traced(weights, cfg, input);
  MultiBlockLoss loss = multi_block_loss(trace.outputs, target, loss_cfg);
  LossAndGradients out;
  out.loss = loss.loss;
  out.gradients = backward(weights, cfg, trace, loss.grad_estimates);
  return out;
}

}  // namespace spadnet
