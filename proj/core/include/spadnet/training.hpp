#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spadnet/checkpoint.hpp"
#include "spadnet/dataset.hpp"
#include "spadnet/network.hpp"

namespace spadnet {

struct TrainConfig {
  int batch_size = 8;
  long steps = 1000;
  SgdConfig sgd;
  double clip_norm = 0.0;  // global gradient L2 norm cap; 0 disables
  long decay_every = 0;      // multiply lr by decay_factor every this many steps; 0 = constant
  double decay_factor = 0.1;
  LossConfig loss;
  std::uint64_t seed = 0;
  PatchSpec patch;
  bool augment = true;
  long checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::filesystem::path checkpoint_path;
  int trained_bits = 0;
  long log_every = 50;

  void validate() const;

  /// Learning rate used at `step`: lr * decay_factor^floor(step / decay_every).
  [[nodiscard]] double learning_rate_at(long step) const noexcept;
};

/// Batch of patches stacked along the tensor batch axis.
struct Batch {
  Tensor5 input;
  Tensor5 target;
};

/// Batch for a given optimizer step. Depends only on (seed, step), so a
/// resumed run sees the same batches as an uninterrupted one.
Batch assemble_batch(std::span<const TrainingPair> pairs, const TrainConfig& cfg,
                     long step);

struct TrainResult {
  NetworkWeights weights;
  std::vector<double> loss_history;
  long final_step = 0;
};

using StepCallback = std::function<void(long step, double loss)>;

/// SGD on the multi-block Charbonnier loss. Parameters are kept at float32
/// precision after every update. Throws NonFiniteLossError on divergence.
TrainResult train(std::span<const TrainingPair> pairs, const NetworkConfig& net_cfg,
                  const TrainConfig& train_cfg,
                  const std::optional<Checkpoint>& resume = std::nullopt,
                  const StepCallback& on_step = {});

/// Rounds every parameter to the nearest float32.
void round_to_float32(NetworkWeights& weights);

}  // namespace spadnet
