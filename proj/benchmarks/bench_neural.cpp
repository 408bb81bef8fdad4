#include <benchmark/benchmark.h>

#include "mvdmm/neural.hpp"
#include "mvdmm/random.hpp"

namespace {

mvdmm::Tensor4 random_tensor(mvdmm::Shape4 shape, std::uint64_t seed) {
  mvdmm::Engine rng(seed);
  mvdmm::Tensor4 t(shape);
  for (auto& v : t.data) v = mvdmm::uniform(rng, 0.0, 1.0);
  return t;
}

void BM_Conv3d(benchmark::State& state) {
  const auto maps = static_cast<std::size_t>(state.range(0));
  const auto side = static_cast<std::size_t>(state.range(1));
  mvdmm::ConvLayerSpec layer;
  layer.in_maps = maps;
  layer.out_maps = maps;
  mvdmm::Engine rng(3);
  layer.weights.resize(layer.weight_count());
  layer.biases.resize(layer.out_maps);
  for (auto& w : layer.weights) w = static_cast<float>(mvdmm::uniform(rng, -0.1, 0.1));
  const auto input = random_tensor({maps, 16, side, side}, 5);
  for (auto _ : state) {
    auto out = mvdmm::conv3d_forward(input, layer);
    benchmark::DoNotOptimize(out.data.data());
  }
  const double macs = static_cast<double>(layer.weight_count()) * 14.0 *
                      static_cast<double>((side - 2) * (side - 2));
  state.counters["MAC/s"] = benchmark::Counter(macs, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv3d)->Args({3, 32})->Args({8, 32})->Args({16, 16})->Unit(benchmark::kMillisecond);

void BM_MaxPool3d(benchmark::State& state) {
  const auto input = random_tensor({16, 16, 32, 32}, 9);
  for (auto _ : state) {
    auto out = mvdmm::maxpool3d(input, {2, 2, 2}, {2, 2, 2});
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_MaxPool3d);

void BM_DeskNetwork(benchmark::State& state) {
  auto net = mvdmm::desk_network(16, 32, 32);
  mvdmm::initialize_weights(net, 1);
  const auto input = random_tensor(net.input, 2);
  for (auto _ : state) {
    auto f = mvdmm::extract_features(input, net);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_DeskNetwork)->Unit(benchmark::kMillisecond);

}  // namespace
