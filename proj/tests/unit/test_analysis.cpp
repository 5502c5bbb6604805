#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ecollapse/analysis.hpp"
#include "ecollapse/ensemble.hpp"
#include "ecollapse/errors.hpp"
#include "ecollapse/mutation.hpp"

using namespace ecollapse;

namespace {

// Two-branch statistics with a prescribed cross-moment series.
EnsembleStats two_branch(const std::vector<std::uint64_t>& steps, const std::vector<double>& cross,
                         double se = 0.0, std::uint64_t trajectories = 1000) {
  EnsembleStats s;
  s.branches = 2;
  s.trajectories = trajectories;
  s.steps = steps;
  s.absorbed = {0, 0};
  for (double c : cross) {
    s.diagonal.push_back({{0.5, se}, {0.5, se}});
    s.cross.push_back({{c, se}});
  }
  return s;
}

RunConfig fixed_run(double k, std::uint64_t steps, std::uint64_t trajectories, std::uint64_t stride) {
  RunConfig cfg;
  cfg.initial = BranchDistribution({0.5, 0.5});
  cfg.mode = FixedK{k};
  cfg.steps = steps;
  cfg.trajectories = trajectories;
  cfg.record_stride = stride;
  cfg.base_seed = 123;
  return cfg;
}

}  // namespace

TEST_CASE("z score") {
  CHECK(z_score(1.0, 0.5, 0.25) == 2.0);
  CHECK(z_score(1.0, 1.0, 0.0) == 0.0);
  CHECK(std::isinf(z_score(1.0, 0.9, 0.0)));
  CHECK(to_string(Verdict::Pass) == "PASS");
  CHECK(to_string(Verdict::Insufficient) == "INSUFFICIENT");
}

TEST_CASE("half-decay estimate") {
  SUBCASE("linear interpolation between records") {
    const auto s = two_branch({0, 10, 20}, {0.25, 0.2, 0.1});
    const auto n = estimate_half_decay(s, 0, 1);
    REQUIRE(n.has_value());
    CHECK(*n == doctest::Approx(17.5));
    CHECK(*estimate_half_decay(s, 1, 0) == doctest::Approx(17.5));
  }
  SUBCASE("not yet collapsed") {
    const auto s = two_branch({0, 10}, {0.25, 0.2});
    CHECK_FALSE(estimate_half_decay(s, 0, 1).has_value());
  }
  SUBCASE("degenerate requests") {
    const auto s = two_branch({0, 10}, {0.25, 0.2});
    CHECK_THROWS_AS(estimate_half_decay(s, 1, 1), DomainError);
    CHECK_THROWS_AS(estimate_half_decay(s, 0, 2), DimensionError);
    CHECK_THROWS_AS(estimate_half_decay(two_branch({0, 1}, {0.0, 0.0}), 0, 1), DomainError);
  }
  SUBCASE("exact geometric series lands on the closed form") {
    std::vector<std::uint64_t> steps;
    std::vector<double> cross;
    for (std::uint64_t n = 0; n <= 200; ++n) {
      steps.push_back(n);
      cross.push_back(0.25 * std::pow(1.0 - 0.01, static_cast<double>(n)));
    }
    CHECK(*estimate_half_decay(two_branch(steps, cross), 0, 1) ==
          doctest::Approx(fixed_k_half_decay_steps(0.1)).epsilon(2e-3));
  }
}

TEST_CASE("martingale test") {
  CHECK(martingale_test(two_branch({0, 1}, {0.25, 0.2}, 0.01, 1)).verdict == Verdict::Insufficient);
  CHECK(martingale_test(two_branch({0, 1}, {0.25, 0.2}, 0.01)).verdict == Verdict::Pass);

  auto drift = two_branch({0, 1, 2}, {0.25, 0.2, 0.15}, 0.01);
  drift.diagonal[2][0].mean = 0.56;
  drift.diagonal[2][1].mean = 0.44;
  const auto r = martingale_test(drift);
  CHECK(r.verdict == Verdict::Fail);
  CHECK(r.worst_step == 2);
  CHECK(r.max_z == doctest::Approx(6.0));

  SUBCASE("a real run passes, the biased rule fails") {
    const auto cfg = fixed_run(0.1, 100, 4000, 10);
    CHECK(martingale_test(run_ensemble(cfg)).verdict == Verdict::Pass);
    CHECK(martingale_test(run_ensemble_with(cfg, 1, mutation::BiasedStep{})).verdict == Verdict::Fail);
  }
}

TEST_CASE("decay fit") {
  SUBCASE("exact series") {
    std::vector<std::uint64_t> steps;
    std::vector<double> cross;
    for (std::uint64_t n = 0; n <= 100; n += 10) {
      steps.push_back(n);
      cross.push_back(0.25 * std::pow(1.0 - 0.04, static_cast<double>(n)));
    }
    const auto s = two_branch(steps, cross, 1e-4);
    const auto r = decay_fit_test(s, 0, 1, 0.2);
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.fitted_rate == doctest::Approx(std::log(0.96)).epsilon(1e-9));
    CHECK(decay_fit_test(s, 0, 1, 0.3).verdict == Verdict::Fail);
  }
  SUBCASE("Monte Carlo run and flipped-sign mutation") {
    const auto cfg = fixed_run(0.1, 200, 4000, 20);
    CHECK(decay_fit_test(run_ensemble(cfg), 0, 1, 0.1).verdict == Verdict::Pass);
    CHECK(decay_fit_test(run_ensemble_with(cfg, 1, mutation::FlippedSignStep{}), 0, 1, 0.1).verdict ==
          Verdict::Fail);
  }
  SUBCASE("errors and insufficient data") {
    const auto s = two_branch({0}, {0.25});
    CHECK(decay_fit_test(s, 0, 1, 0.1).verdict == Verdict::Insufficient);
    CHECK_THROWS_AS(decay_fit_test(s, 0, 1, 1.5), DomainError);
  }
}

TEST_CASE("ensemble comparison") {
  const auto a = two_branch({0, 1}, {0.25, 0.2}, 0.01);
  auto b = a;
  CHECK(compare_ensembles(a, b).verdict == Verdict::Pass);
  b.cross[1][0].mean = 0.3;
  const auto r = compare_ensembles(a, b);
  CHECK(r.verdict == Verdict::Fail);
  CHECK(r.max_abs_diff == doctest::Approx(0.1));
  CHECK_THROWS_AS(compare_ensembles(a, two_branch({0, 2}, {0.25, 0.2})), DimensionError);
}

TEST_CASE("Born statistics") {
  auto s = two_branch({0}, {0.21}, 0.0, 10000);
  s.absorbed = {3000, 7000};
  CHECK(born_statistics_test(s, 0, 0.3).verdict == Verdict::Pass);
  CHECK(born_statistics_test(s, 0, 0.25).verdict == Verdict::Fail);
  CHECK_THROWS_AS(born_statistics_test(s, 2, 0.3), DimensionError);
  s.trajectories = 1;
  CHECK(born_statistics_test(s, 0, 0.3).verdict == Verdict::Insufficient);
}
