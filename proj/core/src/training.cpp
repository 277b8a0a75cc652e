#include "spadnet/training.hpp"

#include <cmath>
#include <string>

#include "spadnet/log.hpp"

namespace spadnet {

double TrainConfig::learning_rate_at(long step) const noexcept {
  if (decay_every <= 0) return sgd.learning_rate;
  return sgd.learning_rate * std::pow(decay_factor, static_cast<double>(step / decay_every));
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw DomainError("batch_size must be >= 1");
  if (steps < 0) throw DomainError("steps must be >= 0");
  if (!(clip_norm >= 0.0) || !std::isfinite(clip_norm)) {
    throw DomainError("clip_norm must be finite and >= 0");
  }
  if (decay_every < 0) throw DomainError("decay_every must be >= 0");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
    throw DomainError("decay_factor must lie in (0,1]");
  }
  if (checkpoint_every < 0) throw DomainError("checkpoint_every must be >= 0");
  if (checkpoint_every > 0 && checkpoint_path.empty()) {
    throw DomainError("checkpoint_every needs a checkpoint_path");
  }
  sgd.validate();
  loss.validate();
}

void round_to_float32(NetworkWeights& weights) {
  for (auto block : weights.parameters()) {
    for (double& v : block) v = static_cast<double>(static_cast<float>(v));
  }
}

namespace {

void clip_gradients(NetworkWeights& grads, double max_norm) {
  double sq = 0.0;
  for (auto block : std::as_const(grads).parameters())
    for (double g : block) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto block : grads.parameters())
    for (double& g : block) g *= scale;
}

}  // namespace

Batch assemble_batch(std::span<const TrainingPair> pairs, const TrainConfig& cfg, long step) {
  if (pairs.empty()) throw DomainError("training set is empty");
  Rng rng = Rng(cfg.seed, 0x7472616e).split(static_cast<std::uint64_t>(step));
  const Shape5 shape{cfg.batch_size, 1, cfg.patch.depth, cfg.patch.height, cfg.patch.width};
  Batch batch{Tensor5(shape), Tensor5(shape)};
  const std::size_t volume = shape.volume();
  for (int n = 0; n < cfg.batch_size; ++n) {
    const auto& source = pairs[rng.uniform_index(pairs.size())];
    TrainingPair patch = sample_patch(source, cfg.patch, rng);
    if (cfg.augment) patch = augment(patch, rng);
    double* in = batch.input.data() + n * volume;
    double* tg = batch.target.data() + n * volume;
    const std::size_t plane = static_cast<std::size_t>(cfg.patch.height) * cfg.patch.width;
    for (int t = 0; t < cfg.patch.depth; ++t) {
      auto iv = patch.input.frames[t].values();
      auto tv = patch.target.frames[t].values();
      std::copy(iv.begin(), iv.end(), in + t * plane);
      std::copy(tv.begin(), tv.end(), tg + t * plane);
    }
  }
  return batch;
}

TrainResult train(std::span<const TrainingPair> pairs, const NetworkConfig& net_cfg,
                  const TrainConfig& train_cfg, const std::optional<Checkpoint>& resume,
                  const StepCallback& on_step) {
  net_cfg.validate();
  train_cfg.validate();
  train_cfg.patch.validate(net_cfg.num_blocks);
  if (pairs.empty()) throw DomainError("training set is empty");

  TrainResult result;
  long start = 0;
  if (resume) {
    if (!(resume->config == net_cfg)) {
      throw ConfigMismatchError("resume checkpoint architecture differs from the network config");
    }
    result.weights = resume->weights;
    start = static_cast<long>(resume->step);
  } else {
    result.weights = init_weights(net_cfg, train_cfg.seed);
  }

  auto save = [&](long step, const std::filesystem::path& path) {
    save_checkpoint(path, Checkpoint{net_cfg, result.weights, static_cast<std::uint64_t>(step),
                                     train_cfg.trained_bits});
  };

  SgdState state;
  for (long step = start; step < train_cfg.steps; ++step) {
    const Batch batch = assemble_batch(pairs, train_cfg, step);
    LossAndGradients lg =
        loss_and_gradients(result.weights, net_cfg, batch.input, batch.target, train_cfg.loss);
    if (!std::isfinite(lg.loss)) {
      throw NonFiniteLossError(step, train_cfg.sgd.learning_rate);
    }
    if (train_cfg.clip_norm > 0.0) clip_gradients(lg.gradients, train_cfg.clip_norm);
    auto params = result.weights.parameters();
    const auto grad_spans = std::as_const(lg.gradients).parameters();
    SgdConfig sgd = train_cfg.sgd;
    sgd.learning_rate = train_cfg.learning_rate_at(step);
    sgd_step(params, grad_spans, sgd, state);
    round_to_float32(result.weights);

    result.loss_history.push_back(lg.loss);
    if (on_step) on_step(step, lg.loss);
    if (train_cfg.log_every > 0 && (step + 1) % train_cfg.log_every == 0) {
      log::info("step " + std::to_string(step + 1) + "/" + std::to_string(train_cfg.steps) +
                " loss " + std::to_string(lg.loss));
    }
    if (train_cfg.checkpoint_every > 0 && (step + 1) % train_cfg.checkpoint_every == 0) {
      save(step + 1, train_cfg.checkpoint_path);
    }
  }
  result.final_step = std::max(start, train_cfg.steps);
  if (!train_cfg.checkpoint_path.empty()) save(result.final_step, train_cfg.checkpoint_path);
  return result;
}

}  // namespace spadnet
