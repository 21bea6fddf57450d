#include <benchmark/benchmark.h>

#include "polarsim/dynamics.hpp"
#include "polarsim/experiments.hpp"
#include "polarsim/generators.hpp"
#include "polarsim/stability.hpp"

using namespace polarsim;

namespace {

Graph power_law_graph(std::size_t n) {
  RngSeed seed{7, 0};
  DegreeSequence d = sample_power_law_degrees(n, 2.5, 2, n - 1, seed.substream(1));
  return configuration_model(d, seed.substream(2));
}

void BM_Step(benchmark::State& state) {
  Graph g = power_law_graph(static_cast<std::size_t>(state.range(0)));
  StateVector x = init_ric(g.node_count(), RngSeed{7, 1});
  for (auto _ : state) benchmark::DoNotOptimize(step(g, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_Step)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_EvolveSic(benchmark::State& state) {
  Graph g = power_law_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evolve_to_steady(g, init_sic(g.node_count(), 0, 1)));
}
BENCHMARK(BM_EvolveSic)->Arg(1000)->Arg(10000);

void BM_EvolveRic(benchmark::State& state) {
  Graph g = power_law_graph(static_cast<std::size_t>(state.range(0)));
  StateVector x = init_ric(g.node_count(), RngSeed{7, 1});
  for (auto _ : state) benchmark::DoNotOptimize(evolve_to_steady(g, x));
}
BENCHMARK(BM_EvolveRic)->Arg(1000)->Arg(10000);

void BM_ConfigurationModel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  DegreeSequence d = sample_power_law_degrees(n, 2.5, 2, n - 1, RngSeed{7, 0});
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(configuration_model(d, RngSeed{7, ++t}));
}
BENCHMARK(BM_ConfigurationModel)->Arg(1000)->Arg(10000);

void BM_PlantedPartition(benchmark::State& state) {
  PlantedPartitionSpec spec;
  spec.node_count = static_cast<std::size_t>(state.range(0));
  spec.block_fractions = {0.7, 0.15, 0.15};
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(planted_partition_poisson(spec, RngSeed{7, ++t}));
}
BENCHMARK(BM_PlantedPartition)->Arg(1000)->Arg(4000);

void BM_ClassifyStability(benchmark::State& state) {
  Graph g = power_law_graph(static_cast<std::size_t>(state.range(0)));
  SteadyStateResult steady = evolve_to_steady(g, init_ric(g.node_count(), RngSeed{7, 3}));
  if (steady.status != Convergence::FixedPoint) {
    state.SkipWithError("no fixed point");
    return;
  }
  for (auto _ : state) benchmark::DoNotOptimize(classify_stability(g, steady));
}
BENCHMARK(BM_ClassifyStability)->Arg(1000)->Arg(5000);

void BM_Ensemble(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.generator = ConfigModelParams{1000, 2.5, 2, std::nullopt};
  cfg.realizations = 20;
  cfg.master_seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(cfg, 1));
}
BENCHMARK(BM_Ensemble)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
