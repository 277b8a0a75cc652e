#include <benchmark/benchmark.h>

#include "spadnet/network.hpp"
#include "spadnet/rng.hpp"

namespace spadnet {
namespace {

Tensor5 uniform(Shape5 shape, std::uint64_t seed) {
  Tensor5 t(shape);
  Rng rng(seed);
  for (double& v : t.values()) v = rng.uniform();
  return t;
}

// One loss + gradient evaluation. args: blocks, channels, patch T, patch H=W
void BM_TrainStep(benchmark::State& state) {
  NetworkConfig cfg;
  cfg.num_blocks = static_cast<int>(state.range(0));
  cfg.channels = static_cast<int>(state.range(1));
  const int t = static_cast<int>(state.range(2));
  const int s = static_cast<int>(state.range(3));
  const NetworkWeights w = init_weights(cfg, 1);
  const Tensor5 input = uniform({1, 1, t, s, s}, 2);
  const Tensor5 target = uniform(input.shape(), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_gradients(w, cfg, input, target, LossConfig{}));
  }
}
BENCHMARK(BM_TrainStep)
    ->Args({1, 8, 16, 24})
    ->Args({3, 16, 16, 24})
    ->Args({3, 60, 16, 24})
    ->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  NetworkConfig cfg;
  cfg.channels = static_cast<int>(state.range(0));
  const NetworkWeights w = init_weights(cfg, 1);
  const Tensor5 input = uniform({1, 1, 16, 32, 32}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(predict(w, cfg, input));
}
BENCHMARK(BM_Predict)->Arg(16)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace spadnet
