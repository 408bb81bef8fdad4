#include <benchmark/benchmark.h>

#include <vector>

#include "mvdmm/learn.hpp"
#include "mvdmm/random.hpp"

namespace {

void BM_FuseScores(benchmark::State& state) {
  mvdmm::Engine rng(4);
  std::vector<mvdmm::ScoreVector> scores;
  for (int i = 0; i < state.range(0); ++i) {
    std::vector<double> margins(10);
    for (auto& m : margins) m = mvdmm::uniform(rng, -3.0, 3.0);
    scores.push_back(mvdmm::softmax(margins));
  }
  for (auto _ : state) {
    auto fused = mvdmm::fuse_scores(scores);
    benchmark::DoNotOptimize(fused.values.data());
  }
}
BENCHMARK(BM_FuseScores)->Arg(12)->Arg(132);

void BM_PcaFit(benchmark::State& state) {
  mvdmm::Engine rng(8);
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(state.range(0)),
                                           std::vector<double>(192));
  for (auto& s : samples) {
    for (auto& v : s) v = mvdmm::normal(rng);
  }
  for (auto _ : state) {
    auto model = mvdmm::pca_fit(samples);
    benchmark::DoNotOptimize(model.components.data());
  }
}
BENCHMARK(BM_PcaFit)->Arg(60)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SvmTrain(benchmark::State& state) {
  mvdmm::Engine rng(6);
  std::vector<std::vector<double>> samples(300, std::vector<double>(32));
  std::vector<int> labels(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    labels[i] = static_cast<int>(i % 3);
    for (auto& v : samples[i]) v = mvdmm::normal(rng) + labels[i];
  }
  for (auto _ : state) {
    auto model = mvdmm::svm_train(samples, labels);
    benchmark::DoNotOptimize(model.weights.data());
  }
}
BENCHMARK(BM_SvmTrain)->Unit(benchmark::kMillisecond);

}  // namespace
