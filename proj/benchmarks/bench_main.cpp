#include <benchmark/benchmark.h>

#include <random>

#include "chaoswave/chaos.hpp"
#include "chaoswave/layers.hpp"
#include "chaoswave/modulate.hpp"
#include "chaoswave/network.hpp"
#include "chaoswave/wavelet.hpp"

namespace {

using namespace chaoswave;

Matrix noise_image(std::size_t side) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(side, side);
  for (double& v : m.data()) v = u(rng);
  return m;
}

void BM_Dwt2dForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Matrix img = noise_image(side);
  const FilterBank bank = default_cdf97();
  for (auto _ : state) benchmark::DoNotOptimize(dwt2d_forward(img, bank, 6));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_Dwt2dForward)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Dwt2dRoundTrip(benchmark::State& state) {
  const Matrix img = noise_image(512);
  const FilterBank bank = default_cdf97();
  for (auto _ : state) benchmark::DoNotOptimize(dwt2d_inverse(dwt2d_forward(img, bank, 6), bank));
}
BENCHMARK(BM_Dwt2dRoundTrip)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(kDefaultInitialState, ChuaParams{}, kDefaultStepSize, kDefaultBurnIn, n));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n + kDefaultBurnIn));
}
BENCHMARK(BM_Integrate)->Arg(10000)->Arg(262144)->Unit(benchmark::kMillisecond);

void BM_EnhanceImage(benchmark::State& state) {
  const Matrix img = noise_image(512);
  const FilterBank bank = default_cdf97();
  for (auto _ : state) benchmark::DoNotOptimize(enhance_image(img, bank, 6, ModulationConfig{}, ChuaParams{}));
}
BENCHMARK(BM_EnhanceImage)->Unit(benchmark::kMillisecond);

void BM_Conv2dForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Tensor x({8, 8, side, side}, 0.5);
  Tensor w({16, 8, 3, 3}, 0.01);
  Tensor b({16});
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_forward(x, w, b));
}
BENCHMARK(BM_Conv2dForward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  Network net(NetworkSpec::conv_blocks(128, 128, {4, 8, 16}));
  net.initialize(1);
  Tensor batch({16, 1, 128, 128}, 0.5);
  std::vector<std::size_t> labels(16);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;
  const std::vector<double> weights{1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(compute_gradients(net, batch, labels, weights));
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
