#pragma once

// End-to-end finite-difference check of network parameter gradients.

#include <algorithm>
#include <vector>

#include "spadnet/network.hpp"
#include "support/oracles.hpp"

namespace spadnet::testing {

struct GradCheckStats {
  std::size_t checked = 0;
  std::size_t skipped = 0;  // FD stencil crossed a Leaky ReLU kink
  double max_rel_error = 0.0;
  std::size_t failures = 0;
};

/// Signs of every hidden pre-activation; a change between w+h and w-h means
/// the central difference straddles a kink and is not a valid oracle.
inline std::vector<bool> kink_pattern(const NetworkWeights& w, const NetworkConfig& cfg,
                                      const Tensor5& input) {
  const ForwardTrace trace = forward_traced(w, cfg, input);
  std::vector<bool> signs;
  for (const auto& block : trace.blocks)
    for (const auto& act : block.activations)
      for (double v : act.values()) signs.push_back(v < 0.0);
  return signs;
}

inline GradCheckStats check_network_gradients(const NetworkWeights& weights,
                                              const NetworkConfig& cfg, const Tensor5& input,
                                              const Tensor5& target, std::size_t samples,
                                              std::uint64_t seed, double tol,
                                              double h = 1e-4, double floor = 1e-7) {
  const LossConfig loss_cfg{};
  const LossAndGradients analytic = loss_and_gradients(weights, cfg, input, target, loss_cfg);
  const auto grads = analytic.gradients.parameters();

  NetworkWeights w = weights;
  auto params = w.parameters();
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t b = 0; b < params.size(); ++b)
    for (std::size_t i = 0; i < params[b].size(); ++i) index.emplace_back(b, i);

  Rng rng(seed, 0x67726164);
  GradCheckStats stats;
  const std::size_t n = std::min(samples, index.size());
  for (std::size_t s = 0; s < n; ++s) {
    // Partial Fisher-Yates: distinct coordinates.
    const std::size_t j = s + rng.uniform_index(index.size() - s);
    std::swap(index[s], index[j]);
    const auto [b, i] = index[s];
    double& x = params[b][i];
    auto loss = [&] {
      return multi_block_loss(forward(w, cfg, input), target, loss_cfg).loss;
    };
    const double saved = x;
    x = saved + h;
    const auto plus_pattern = kink_pattern(w, cfg, input);
    x = saved - h;
    const auto minus_pattern = kink_pattern(w, cfg, input);
    x = saved;
    if (plus_pattern != minus_pattern) {
      ++stats.skipped;
      continue;
    }
    const double fd = central_difference(loss, x, h);
    const double err = relative_error(grads[b][i], fd, floor);
    stats.max_rel_error = std::max(stats.max_rel_error, err);
    if (err > tol) ++stats.failures;
    ++stats.checked;
  }
  return stats;
}

}  // namespace spadnet::testing
