#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ecollapse/dynamics.hpp"

using namespace ecollapse;

namespace {

std::vector<double> random_weights(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> w(m);
  for (auto& x : w) x = exp1(gen);
  return BranchDistribution::normalized(w).vector();
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> e(0.0, 1e-3);
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (auto& row : rows)
    for (auto& x : row) x = e(gen);
  return rows;
}

void BM_TinyCollapseStep(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  auto p = random_weights(m, 1);
  RandomStream rng(2);
  for (auto _ : state) {
    tiny_collapse_step_inplace(p, 1e-3, sample_collapse_branch(p, rng.uniform()));
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TinyCollapseStep)->RangeMultiplier(4)->Range(2, 1024);

void BM_UncertaintyPairwise(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto p = random_weights(m, 3);
  const auto rows = random_rows(n, m, 4);
  for (auto _ : state) {
    double total = 0.0;
    for (const auto& row : rows) total += pairwise_uncertainty(p, row);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_UncertaintyPairwise)->ArgsProduct({{8, 64, 512}, {1, 16}});

void BM_UncertaintyKernel(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto p = random_weights(m, 3);
  const UncertaintyKernel kernel(ManyBodySpectrum::from_planck(random_rows(n, m, 4)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(p));
}
BENCHMARK(BM_UncertaintyKernel)->ArgsProduct({{8, 64, 512}, {1, 16}});

}  // namespace
