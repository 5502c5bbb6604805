#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ecollapse/analysis.hpp"
#include "ecollapse/ensemble.hpp"
#include "ecollapse/errors.hpp"
#include "ecollapse/random.hpp"

using namespace ecollapse;

namespace {

RunConfig fixed_config(std::vector<double> p, double k, std::uint64_t steps, std::uint64_t trajectories,
                       std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.initial = BranchDistribution(std::move(p));
  cfg.mode = FixedK{k};
  cfg.steps = steps;
  cfg.trajectories = trajectories;
  cfg.base_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("trajectory seeds") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(trajectory_seed(42, i));
  CHECK(seen.size() == 10000);
  CHECK(trajectory_seed(1, 0) != trajectory_seed(2, 0));
  RandomStream a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("single trajectory") {
  SUBCASE("vertex start never moves") {
    auto cfg = fixed_config({1.0, 0.0}, 0.5, 10, 1);
    const auto t = run_trajectory(cfg, 0);
    CHECK(t.absorbed_branch == 0u);
    CHECK(t.absorption_step == 0u);
    REQUIRE(t.snapshots.size() == 1);
    CHECK(t.snapshots[0] == BranchDistribution::vertex(2, 0));
  }
  SUBCASE("k = 1 absorbs on the first step") {
    auto cfg = fixed_config({0.5, 0.5}, 1.0, 5, 1);
    const auto t = run_trajectory(cfg, 3);
    REQUIRE(t.absorbed_branch.has_value());
    CHECK(t.absorption_step == 1u);
    CHECK(t.snapshots.back() == BranchDistribution::vertex(2, *t.absorbed_branch));
  }
  SUBCASE("k = 0 is frozen") {
    auto cfg = fixed_config({0.3, 0.7}, 0.0, 20, 1);
    const auto t = run_trajectory(cfg, 0);
    CHECK_FALSE(t.absorbed_branch.has_value());
    CHECK(t.snapshots.size() == 21);
    for (const auto& s : t.snapshots) CHECK(s == cfg.initial);
  }
  SUBCASE("same index, same path") {
    auto cfg = fixed_config({0.2, 0.3, 0.5}, 0.2, 50, 1, 9);
    const auto a = run_trajectory(cfg, 17);
    const auto b = run_trajectory(cfg, 17);
    CHECK(a.snapshots == b.snapshots);
    CHECK(run_trajectory(cfg, 18).snapshots != a.snapshots);
  }
  SUBCASE("stays on the simplex") {
    auto cfg = fixed_config({0.2, 0.3, 0.5}, 0.37, 400, 1, 3);
    for (std::uint64_t i = 0; i < 20; ++i) {
      for (const auto& s : run_trajectory(cfg, i).snapshots) CHECK(is_on_simplex(s.probs()));
    }
  }
}

TEST_CASE("configuration errors") {
  auto cfg = fixed_config({0.5, 0.5}, 0.1, 10, 10);
  CHECK_NOTHROW(cfg.validate());
  SUBCASE("k out of range") {
    cfg.mode = FixedK{1.5};
    CHECK_THROWS_AS(run_ensemble(cfg), DomainError);
  }
  SUBCASE("model-k without spectrum") {
    cfg.mode = ModelK{};
    CHECK_THROWS_AS(run_ensemble(cfg), DomainError);
  }
  SUBCASE("spectrum length") {
    cfg.spectrum = EnergySpectrum::from_planck({0.0, 0.1, 0.2});
    CHECK_THROWS_AS(run_ensemble(cfg), DimensionError);
  }
  SUBCASE("zero counts") {
    cfg.steps = 0;
    CHECK_THROWS_AS(run_ensemble(cfg), DomainError);
  }
  SUBCASE("budget") {
    cfg.steps = 1000;
    cfg.trajectories = 1000;
    cfg.step_budget = 1e5;
    CHECK_THROWS_AS(run_ensemble(cfg), ResourceError);
    auto single = fixed_config({0.5, 0.5}, 0.1, 1000, 1);
    single.step_budget = 100;
    CHECK_THROWS_AS(run_trajectory(single, 0), ResourceError);
  }
  SUBCASE("bad observation partition") {
    cfg.observe_groups = Partition{{0}};
    CHECK_THROWS_AS(run_ensemble(cfg), DomainError);
  }
}

TEST_CASE("ensemble shape and bookkeeping") {
  auto cfg = fixed_config({0.3, 0.7}, 0.1, 100, 500);
  cfg.record_stride = 10;
  const auto stats = run_ensemble(cfg);
  CHECK(stats.branches == 2);
  CHECK(stats.trajectories == 500);
  REQUIRE(stats.records() == 11);
  CHECK(stats.steps.front() == 0);
  CHECK(stats.steps.back() == 100);
  CHECK(stats.diagonal[0][0].mean == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(stats.diagonal[0][0].std_error == 0.0);
  CHECK(stats.cross_at(0, 1, 0).mean == doctest::Approx(0.21).epsilon(1e-14));
  std::uint64_t total = stats.unabsorbed;
  for (auto a : stats.absorbed) total += a;
  CHECK(total == 500);
  // diagonal moments sum to one at every record
  for (std::size_t r = 0; r < stats.records(); ++r) {
    CHECK(stats.diagonal[r][0].mean + stats.diagonal[r][1].mean == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("k = 1 absorbs every trajectory after one step") {
  auto cfg = fixed_config({0.5, 0.5}, 1.0, 3, 2000);
  const auto stats = run_ensemble(cfg);
  CHECK(stats.unabsorbed == 0);
  CHECK(stats.cross_at(1, 0, 1).mean == 0.0);
  CHECK(stats.cross_at(3, 0, 1).mean == 0.0);
  const auto born = born_statistics_test(stats, 0, 0.5);
  CHECK(born.verdict == Verdict::Pass);
}

TEST_CASE("identical output for any worker count") {
  auto cfg = fixed_config({0.2, 0.3, 0.5}, 0.15, 40, 1000, 77);
  const auto one = run_ensemble(cfg, 1);
  CHECK(run_ensemble(cfg, 2) == one);
  CHECK(run_ensemble(cfg, 5) == one);
  CHECK(run_ensemble(cfg, 0) == one);
  cfg.base_seed = 78;
  CHECK_FALSE(run_ensemble(cfg, 1) == one);
}

TEST_CASE("model-k ensemble keeps the martingale") {
  RunConfig cfg;
  cfg.initial = BranchDistribution::uniform(3);
  cfg.spectrum = EnergySpectrum::from_planck({0.0, 0.02, 0.04});
  cfg.mode = ModelK{};
  cfg.steps = 1000;
  cfg.trajectories = 2000;
  cfg.record_stride = 100;
  cfg.base_seed = 5;
  const auto stats = run_ensemble(cfg);
  CHECK(martingale_test(stats).verdict == Verdict::Pass);
  // decoherence happens
  CHECK(stats.cross_at(stats.records() - 1, 0, 2).mean < 0.5 * stats.cross_at(0, 0, 2).mean);
}

TEST_CASE("many-body spectrum drives collapse where the total energy is degenerate") {
  RunConfig cfg;
  cfg.initial = BranchDistribution({0.5, 0.5});
  cfg.spectrum = ManyBodySpectrum::from_planck({{0.05, 0.0}, {0.0, 0.05}});
  cfg.mode = ModelK{};
  cfg.steps = 300;
  cfg.trajectories = 500;
  cfg.record_stride = 300;
  const auto stats = run_ensemble(cfg);
  CHECK(stats.cross_at(1, 0, 1).mean < 0.2);

  cfg.spectrum = std::get<ManyBodySpectrum>(cfg.spectrum).total_energy();
  const auto frozen = run_ensemble(cfg);
  CHECK(frozen.cross_at(1, 0, 1).mean == doctest::Approx(0.25));
}

TEST_CASE("observation through a coarse partition matches a direct coarse run") {
  auto fine = fixed_config({0.1, 0.2, 0.3, 0.4}, 0.2, 60, 4000, 1);
  fine.record_stride = 10;
  fine.observe_groups = Partition{{0, 2}, {1, 3}};
  const auto a = run_ensemble(fine);
  CHECK(a.branches == 2);

  auto coarse = fixed_config({0.4, 0.6}, 0.2, 60, 4000, 2);
  coarse.record_stride = 10;
  const auto b = run_ensemble(coarse);
  CHECK(compare_ensembles(a, b).verdict == Verdict::Pass);
}
