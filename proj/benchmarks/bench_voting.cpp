#include <benchmark/benchmark.h>

#include "bench_common.hpp"

namespace {

using namespace corrvote;
using corrvote::bench::VotingFixture;

void BM_LocalStage(benchmark::State& state) {
  const VotingFixture fx(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const VotingResult r =
        local_voting_stage(fx.cs, fx.model, fx.model, fx.params, 2);
    benchmark::DoNotOptimize(r.tallies.size());
  }
}
BENCHMARK(BM_LocalStage)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_GlobalStage(benchmark::State& state) {
  const VotingFixture fx(static_cast<std::size_t>(state.range(0)));
  const VotingResult stage1 =
      local_voting_stage(fx.cs, fx.model, fx.model, fx.params, 2);
  for (auto _ : state) {
    VotingResult r = stage1;
    global_voting_stage(fx.cs, fx.model, fx.model, fx.frames, fx.frames, fx.params,
                        r, 2);
    benchmark::DoNotOptimize(r.tallies.size());
  }
}
BENCHMARK(BM_GlobalStage)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_FullVoting(benchmark::State& state) {
  const VotingFixture fx(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const VotingResult r =
        run_voting(fx.cs, fx.model, fx.model, fx.frames, fx.frames, fx.params, 2);
    benchmark::DoNotOptimize(r.tallies.size());
  }
}
BENCHMARK(BM_FullVoting)->Arg(10000)->Arg(20000)->Arg(40000)
    ->Unit(benchmark::kMillisecond);

}  // namespace
