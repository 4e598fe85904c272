#include <benchmark/benchmark.h>

#include "corrvote/kdtree.hpp"
#include "corrvote/rng.hpp"
#include "corrvote/synthetic.hpp"

namespace {

using namespace corrvote;

void BM_KdTreeBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud cloud = make_bumpy_model(n, 2);
  std::vector<std::array<double, 3>> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {cloud.point(i).x(), cloud.point(i).y(), cloud.point(i).z()};
  }
  for (auto _ : state) {
    KdTree<3> tree{std::vector<std::array<double, 3>>(pts)};
    benchmark::DoNotOptimize(tree.size());
  }
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_KdTreeKnn(benchmark::State& state) {
  const std::size_t n = 20000;
  const auto k = static_cast<std::size_t>(state.range(0));
  const PointCloud cloud = make_bumpy_model(n, 3);
  Rng rng(4);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto hits = cloud.knn(cloud.point(i % n), k);
    benchmark::DoNotOptimize(hits.size());
    i += 37;
  }
}
BENCHMARK(BM_KdTreeKnn)->Arg(2)->Arg(50)->Arg(250)->Unit(benchmark::kMicrosecond);

void BM_DescriptorKnn64(benchmark::State& state) {
  const std::size_t n = 5000;
  Rng rng(5);
  std::vector<std::array<double, 64>> pts(n);
  for (auto& p : pts) {
    double norm = 0.0;
    for (auto& v : p) {
      v = rng.uniform();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : p) v /= norm;
  }
  const KdTree<64> tree{std::vector<std::array<double, 64>>(pts)};
  std::size_t i = 0;
  for (auto _ : state) {
    const auto hits = tree.knn(pts[i % n], 2);
    benchmark::DoNotOptimize(hits[0].index);
    i += 17;
  }
}
BENCHMARK(BM_DescriptorKnn64)->Unit(benchmark::kMicrosecond);

}  // namespace
