#include <benchmark/benchmark.h>

#include <cmath>

#include "mvdmm/motion.hpp"

namespace {

mvdmm::ScalarGrid pattern(std::size_t side, double shift) {
  mvdmm::ScalarGrid g(side, side);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      g(x, y) = std::sin(0.4 * (static_cast<double>(x) - shift)) * std::cos(0.3 * static_cast<double>(y));
    }
  }
  return g;
}

void BM_HornSchunck(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = pattern(side, 0.0);
  const auto b = pattern(side, 1.0);
  for (auto _ : state) {
    auto f = mvdmm::estimate_flow(a, b);
    benchmark::DoNotOptimize(f.ox.data.data());
  }
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_HornSchunck)->RangeMultiplier(2)->Range(32, 256)->Complexity();

}  // namespace
