#include <benchmark/benchmark.h>

#include "hmtsp/mcts.hpp"
#include "hmtsp/sampling.hpp"
#include "hmtsp/spatial_grid.hpp"

namespace {

using namespace hmtsp;

Instance make_instance(std::size_t n) {
  Rng rng(n);
  return generate_instance(n, rng);
}

void BM_GridKnn(benchmark::State& st) {
  const Instance inst = make_instance(static_cast<std::size_t>(st.range(0)));
  const SpatialGrid grid(inst.coords());
  Vertex q = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(grid.nearest(q, 49));
    q = static_cast<Vertex>((q + 7919) % static_cast<Vertex>(inst.size()));
  }
}
BENCHMARK(BM_GridKnn)->Arg(1000)->Arg(10000);

void BM_SurrogateHeatmap(benchmark::State& st) {
  const Instance inst = make_instance(50);
  for (auto _ : st) benchmark::DoNotOptimize(surrogate_heatmap(inst));
}
BENCHMARK(BM_SurrogateHeatmap);

void BM_Pipeline(benchmark::State& st) {
  const Instance inst = make_instance(static_cast<std::size_t>(st.range(0)));
  const SurrogateProvider provider;
  for (auto _ : st) {
    Rng rng(1);
    benchmark::DoNotOptimize(build_global_heatmap(inst, provider, PipelineOptions{}, rng));
  }
}
BENCHMARK(BM_Pipeline)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Enumerate2Opt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Instance inst = make_instance(n);
  const HeatMap hm = prune_unpromising(surrogate_heatmap(inst), inst);
  SearchState state(inst, hm, Params{});
  Rng rng(2);
  for (auto _ : st) {
    st.PauseTiming();
    state.set_tour(init_state(inst, hm, rng));
    st.ResumeTiming();
    benchmark::DoNotOptimize(enumerate_2opt(state));
  }
}
BENCHMARK(BM_Enumerate2Opt)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_SampleAction(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Instance inst = make_instance(n);
  const HeatMap hm = prune_unpromising(surrogate_heatmap(inst), inst);
  SearchState state(inst, hm, Params{});
  Rng rng(3);
  state.set_tour(init_state(inst, hm, rng));
  enumerate_2opt(state);
  for (auto _ : st) benchmark::DoNotOptimize(sample_action(state, rng));
}
BENCHMARK(BM_SampleAction)->Arg(9)->Arg(200)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
