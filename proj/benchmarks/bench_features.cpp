#include <benchmark/benchmark.h>

#include "corrvote/descriptor.hpp"
#include "corrvote/otsu.hpp"
#include "corrvote/rng.hpp"
#include "corrvote/synthetic.hpp"

namespace {

using namespace corrvote;

void BM_ComputeAllFeatures(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud base = make_bumpy_model(n, 6);
  const double res = estimate_resolution(base);
  const PointCloud cloud = estimate_normals(base, 4.0 * res, std::nullopt, 2);
  for (auto _ : state) {
    const FeatureSet fs = compute_all_features(cloud, 8.0 * res, 2);
    benchmark::DoNotOptimize(fs.size());
  }
}
BENCHMARK(BM_ComputeAllFeatures)->Arg(2000)->Arg(10000)
    ->Unit(benchmark::kMillisecond);

void BM_EstimateNormals(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud cloud = make_bumpy_model(n, 7);
  const double res = estimate_resolution(cloud);
  for (auto _ : state) {
    const PointCloud out = estimate_normals(cloud, 4.0 * res, std::nullopt, 2);
    benchmark::DoNotOptimize(out.size());
  }
}
BENCHMARK(BM_EstimateNormals)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_OtsuThreshold(benchmark::State& state) {
  Rng rng(8);
  std::vector<double> scores;
  for (int i = 0; i < 20000; ++i) {
    const double center = rng.uniform() < 0.3 ? 0.8 : 0.1;
    scores.push_back(std::clamp(center + 0.05 * rng.normal(), 0.0, 1.0));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(otsu_threshold(scores));
  }
}
BENCHMARK(BM_OtsuThreshold)->Unit(benchmark::kMicrosecond);

}  // namespace
