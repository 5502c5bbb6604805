#include <benchmark/benchmark.h>

#include "ecollapse/ensemble.hpp"
#include "ecollapse/oracle.hpp"

using namespace ecollapse;

namespace {

// Trajectory-steps per second for a 3-level fixed-k ensemble.
void BM_EnsembleThroughput(benchmark::State& state) {
  RunConfig cfg;
  cfg.initial = BranchDistribution::uniform(3);
  cfg.mode = FixedK{0.05};
  cfg.steps = 1000;
  cfg.trajectories = 1000;
  cfg.record_stride = 100;
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(cfg, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.steps * cfg.trajectories));
}
BENCHMARK(BM_EnsembleThroughput)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ModelKEnsemble(benchmark::State& state) {
  RunConfig cfg;
  cfg.initial = BranchDistribution::uniform(3);
  cfg.spectrum = EnergySpectrum::from_planck({0.0, 0.02, 0.04});
  cfg.mode = ModelK{};
  cfg.steps = 1000;
  cfg.trajectories = 1000;
  cfg.record_stride = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(cfg, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.steps * cfg.trajectories));
}
BENCHMARK(BM_ModelKEnsemble)->Unit(benchmark::kMillisecond);

void BM_ExactEnumeration(benchmark::State& state) {
  const auto steps = static_cast<std::uint64_t>(state.range(0));
  const auto d = BranchDistribution({0.2, 0.3, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_exact(d, steps, FixedK{0.3}));
}
BENCHMARK(BM_ExactEnumeration)->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
