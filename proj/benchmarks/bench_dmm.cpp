#include <benchmark/benchmark.h>

#include <vector>

#include "mvdmm/dmm.hpp"
#include "mvdmm/geometry.hpp"
#include "mvdmm/random.hpp"

namespace {

std::vector<mvdmm::ProjectedMap> random_maps(std::size_t n, std::size_t side) {
  mvdmm::Engine rng(11);
  std::vector<mvdmm::ProjectedMap> maps(n);
  for (auto& m : maps) {
    m.grid = mvdmm::ScalarGrid(side, side);
    for (auto& v : m.grid.data) v = static_cast<double>(mvdmm::uniform_index(rng, 4000));
  }
  return maps;
}

void BM_TemplateStream(benchmark::State& state) {
  const auto maps = random_maps(40, 64);
  const auto window = state.range(0) == 0 ? mvdmm::TemporalWindow::all()
                                          : mvdmm::TemporalWindow::of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = mvdmm::template_stream(maps, {}, window);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(BM_TemplateStream)->Arg(5)->Arg(10)->Arg(0);

void BM_RenderTemplate(benchmark::State& state) {
  const auto maps = random_maps(6, 64);
  const auto tpl = mvdmm::accumulate_dmm(maps, 0, mvdmm::TemporalWindow::of(5));
  for (auto _ : state) {
    auto img = mvdmm::render_template(tpl, 112, 112);
    benchmark::DoNotOptimize(img.data.data());
  }
}
BENCHMARK(BM_RenderTemplate);

void BM_SynthesizeView(benchmark::State& state) {
  mvdmm::DepthFrame frame;
  frame.depth = mvdmm::Grid<std::uint32_t>(320, 240, 2000);
  const auto k = mvdmm::Intrinsics::for_frame(320, 240);
  for (auto _ : state) {
    auto out = mvdmm::synthesize_view(frame, k, {30.0, 0.0}, {0.0, 0.0, 2000.0});
    benchmark::DoNotOptimize(out.depth.data.data());
  }
}
BENCHMARK(BM_SynthesizeView)->Unit(benchmark::kMillisecond);

}  // namespace
