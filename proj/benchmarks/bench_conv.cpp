#include <benchmark/benchmark.h>

#include "spadnet/rng.hpp"
#include "spadnet/tensor_ops.hpp"

namespace spadnet {
namespace {

Tensor5 filled(Shape5 shape, std::uint64_t seed) {
  Tensor5 t(shape);
  Rng rng(seed);
  for (double& v : t.values()) v = rng.uniform() - 0.5;
  return t;
}

ConvKernel3 kernel(int cout, int cin, std::uint64_t seed) {
  ConvKernel3 k(cout, cin, 3, 3, 3);
  k.weights = filled(k.weights.shape(), seed);
  return k;
}

// args: channels, spatial size (T = size, H = W = size)
void BM_Conv3dForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Tensor5 in = filled({1, c, s, s, s}, 1);
  const ConvKernel3 k = kernel(c, c, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv3d_forward(in, k));
  state.counters["GFLOP/s"] = benchmark::Counter(
      2.0 * c * c * 27 * s * s * s, benchmark::Counter::kIsIterationInvariantRate,
      benchmark::Counter::kIs1000);
}
BENCHMARK(BM_Conv3dForward)->Args({8, 16})->Args({8, 32})->Args({60, 16})->Args({60, 24})
    ->Unit(benchmark::kMillisecond);

void BM_Conv3dBackward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Tensor5 in = filled({1, c, s, s, s}, 1);
  const ConvKernel3 k = kernel(c, c, 2);
  const Tensor5 grad = filled(in.shape(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(conv3d_backward(in, k, grad));
  state.counters["GFLOP/s"] = benchmark::Counter(
      4.0 * c * c * 27 * s * s * s, benchmark::Counter::kIsIterationInvariantRate,
      benchmark::Counter::kIs1000);
}
BENCHMARK(BM_Conv3dBackward)->Args({8, 16})->Args({60, 16})->Unit(benchmark::kMillisecond);

void BM_Conv3dReplicate(benchmark::State& state) {
  const Tensor5 in = filled({1, 8, 16, 24, 24}, 1);
  const ConvKernel3 k = kernel(8, 8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv3d_forward(in, k, Padding::replicate));
}
BENCHMARK(BM_Conv3dReplicate)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace spadnet
