#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ecollapse/dynamics.hpp"
#include "ecollapse/errors.hpp"

using namespace ecollapse;

namespace {

// Reference double sum over all ordered pairs, as literally written.
double half_double_sum(const std::vector<double>& p, const std::vector<double>& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) s += p[i] * p[j] * std::abs(e[i] - e[j]);
  return 0.5 * s;
}

std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t m) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> w(m);
  for (auto& x : w) x = exp1(gen);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("energy uncertainty examples") {
  const CollapseConstants c;
  SUBCASE("single branch has none") {
    const auto d = BranchDistribution({1.0});
    CHECK(energy_uncertainty(d, EnergySpectrum::from_eV(std::vector<double>{3.7}, c)).planck() == 0.0);
  }
  SUBCASE("two levels, 1 eV apart") {
    const auto d = BranchDistribution({0.5, 0.5});
    const auto de = energy_uncertainty(d, EnergySpectrum::from_eV(std::vector<double>{0.0, 1.0}, c));
    CHECK(de.eV(c) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("three equal-weight levels") {
    const auto d = BranchDistribution::uniform(3);
    const auto de = energy_uncertainty(d, EnergySpectrum::from_eV(std::vector<double>{0.0, 1.0, 2.0}, c));
    CHECK(de.eV(c) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(energy_uncertainty(BranchDistribution({0.5, 0.5}), EnergySpectrum::from_planck({0, 1, 2})),
                    DimensionError);
  }
}

TEST_CASE("many-body energy uncertainty") {
  const CollapseConstants c;
  const auto d = BranchDistribution({0.5, 0.5});
  SUBCASE("degenerate total energy, non-zero subsystem sum") {
    const auto spec = ManyBodySpectrum::from_eV({{1.0, 0.0}, {0.0, 1.0}}, c);
    CHECK(energy_uncertainty_many_body(d, spec).eV(c) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(energy_uncertainty(d, spec.total_energy()).planck() == 0.0);
  }
  SUBCASE("identical branches") {
    const auto spec = ManyBodySpectrum::from_planck({{0.2, 0.2}, {0.7, 0.7}});
    CHECK(energy_uncertainty_many_body(d, spec).planck() == 0.0);
  }
  SUBCASE("dimension mismatch") {
    const auto spec = ManyBodySpectrum::from_planck({{0.0, 0.1, 0.2}});
    CHECK_THROWS_AS(energy_uncertainty_many_body(d, spec), DimensionError);
  }
}

TEST_CASE("energy uncertainty properties") {
  std::mt19937_64 gen(20260101);
  std::uniform_real_distribution<double> energy(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 9);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = size(gen);
    const std::size_t n = size(gen);
    const auto p = random_simplex(gen, m);
    const auto dist = BranchDistribution::normalized(p);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (auto& row : rows)
      for (auto& e : row) e = energy(gen);
    const auto many = ManyBodySpectrum::from_planck(rows);

    // n=1 reduces to the single-system form, which matches the double sum.
    const auto single = EnergySpectrum::from_planck(rows[0]);
    const double direct = energy_uncertainty(dist, single).planck();
    CHECK(direct == doctest::Approx(half_double_sum(dist.vector(), rows[0])).epsilon(1e-12));
    CHECK(energy_uncertainty_many_body(dist, ManyBodySpectrum::from_planck({rows[0]})).planck() ==
          doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct >= 0.0);

    // additivity over subsystems, and dominance over the total-energy form
    double row_sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) row_sum += energy_uncertainty(dist, many.row_spectrum(l)).planck();
    const double mb = energy_uncertainty_many_body(dist, many).planck();
    CHECK(mb == doctest::Approx(row_sum).epsilon(1e-12));
    CHECK(mb >= energy_uncertainty(dist, many.total_energy()).planck() - 1e-15);

    // sorted kernel agrees with the direct sum
    CHECK(UncertaintyKernel(many)(dist.probs()) == doctest::Approx(mb).epsilon(1e-10).scale(1e-15));

    // swap symmetry
    if (m >= 2) {
      std::uniform_int_distribution<std::size_t> pick(0, m - 1);
      const std::size_t a = pick(gen), b = pick(gen);
      auto p2 = dist.vector();
      auto e2 = rows[0];
      std::swap(p2[a], p2[b]);
      std::swap(e2[a], e2[b]);
      CHECK(energy_uncertainty(BranchDistribution::normalized(p2), EnergySpectrum::from_planck(e2)).planck() ==
            doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero uncertainty iff occupied levels share one energy") {
  const auto spec = EnergySpectrum::from_planck({0.3, 0.3, 0.9});
  CHECK(energy_uncertainty(BranchDistribution({0.4, 0.6, 0.0}), spec).planck() == 0.0);
  CHECK(energy_uncertainty(BranchDistribution({0.4, 0.5, 0.1}), spec).planck() > 0.0);
}

TEST_CASE("collapse strength") {
  const CollapseConstants c;
  CHECK(collapse_strength(Energy::from_planck(0.0), c) == 0.0);
  // t_P / hbar = 5.391247e-44 / 6.582119569e-16
  CHECK(collapse_strength(Energy::from_eV(1.0, c), c) == doctest::Approx(8.190746071206778e-29).epsilon(1e-9));
  CHECK(collapse_strength(Energy::from_eV(c.hbar() / c.planck_time(), c), c) == doctest::Approx(1.0));
  CHECK(collapse_strength(Energy::from_eV(10.0 * c.planck_energy(), c), c) == 1.0);
  CHECK_THROWS_AS(collapse_strength(Energy::from_planck(-1e-3), c), DomainError);
  CHECK(c.strength_per_planck_energy() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("collapse time estimate") {
  const CollapseConstants c;
  auto tau = [&](double ev) { return collapse_time_estimate(Energy::from_eV(ev, c), c); };
  CHECK(std::isinf(tau(0.0)));
  // within one order of magnitude of the quoted figures
  CHECK(std::abs(std::log10(tau(1e-6) / 1e25)) < 1.0);
  CHECK(std::abs(std::log10(tau(8.6e-6) / 1e23)) < 1.0);
  CHECK(std::abs(std::log10(tau(2.5e11) / 1.25e-10)) < 1.0);
  // tau_c = 2 pi t_P / k^2
  const double k = collapse_strength(Energy::from_eV(1e3, c), c);
  CHECK(tau(1e3) == doctest::Approx(2.0 * std::numbers::pi * c.planck_time() / (k * k)).epsilon(1e-12));
  // strictly decreasing
  double previous = tau(1e-9);
  for (double e = 1e-8; e < 1e20; e *= 10.0) {
    CHECK(tau(e) < previous);
    previous = tau(e);
  }
}

TEST_CASE("branch sampling") {
  const std::vector<double> vertex{1.0, 0.0, 0.0};
  for (double u : {0.0, 0.3, 0.999999}) CHECK(sample_collapse_branch(vertex, u) == 0);

  SUBCASE("boundary draw goes to the later bucket") {
    const std::vector<double> p{0.25, 0.75};
    CHECK(sample_collapse_branch(p, 0.25) == 1);
    CHECK(sample_collapse_branch(p, std::nextafter(0.25, 0.0)) == 0);
  }
  SUBCASE("residual mass falls to the last occupied bucket") {
    const std::vector<double> p{0.5, 0.5 - 1e-15, 0.0};
    CHECK(sample_collapse_branch(p, 1.0 - 1e-16) == 1);
  }
  SUBCASE("binomial frequency") {
    const auto d = BranchDistribution({0.3, 0.7});
    RandomStream rng(99);
    const int n = 100000;
    int zeros = 0;
    for (int i = 0; i < n; ++i) zeros += sample_collapse_branch(d, rng) == 0;
    const double se = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::abs(zeros / double(n) - 0.3) < 3.0 * se);
  }
}

TEST_CASE("tiny collapse step examples") {
  const auto d = BranchDistribution({0.3, 0.7});
  const auto next = tiny_collapse_step(d, 0.1, 0);
  CHECK(next[0] == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(next[1] == doctest::Approx(0.63).epsilon(1e-14));
  CHECK(tiny_collapse_step(d, 0.0, 1) == d);
  const auto full = tiny_collapse_step(BranchDistribution({0.2, 0.5, 0.3}), 1.0, 2);
  CHECK(full == BranchDistribution::vertex(3, 2));
  CHECK_THROWS_AS(tiny_collapse_step(d, -0.01, 0), DomainError);
  CHECK_THROWS_AS(tiny_collapse_step(d, 1.01, 0), DomainError);
  CHECK_THROWS_AS(tiny_collapse_step(d, 0.5, 2), DimensionError);
}

TEST_CASE("one-step martingale and cross-moment contraction") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = size(gen);
    const auto dist = BranchDistribution::normalized(random_simplex(gen, m));
    const double k = unit(gen);
    std::vector<double> mean(m, 0.0);
    std::vector<double> cross(m * m, 0.0);
    for (std::size_t l = 0; l < m; ++l) {
      const auto next = tiny_collapse_step(dist, k, l);
      for (std::size_t i = 0; i < m; ++i) {
        mean[i] += dist[l] * next[i];
        for (std::size_t j = 0; j < m; ++j) cross[i * m + j] += dist[l] * next[i] * next[j];
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(std::abs(mean[i] - dist[i]) < 1e-12);
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) CHECK(std::abs(cross[i * m + j] - (1.0 - k * k) * dist[i] * dist[j]) < 1e-12);
      }
    }
  }
}

TEST_CASE("evolve step") {
  const CollapseConstants c;
  RandomStream rng(1);
  SUBCASE("vertices are absorbing in model-k mode") {
    const auto spec = EnergySpectrum::from_planck({0.0, 0.05, 0.1});
    auto d = BranchDistribution::vertex(3, 1);
    for (int i = 0; i < 100; ++i) d = evolve_step(d, spec, rng, ModelK{}, c);
    CHECK(d == BranchDistribution::vertex(3, 1));
  }
  SUBCASE("two-level model-k uses dE = P1 P2 |E1 - E2|") {
    const double gap = 0.1;
    const auto spec = EnergySpectrum::from_planck({0.0, gap});
    const auto d = BranchDistribution({0.5, 0.5});
    const double k = 0.25 * gap * c.strength_per_planck_energy();
    RandomStream a(5), b(5);
    const auto stepped = evolve_step(d, spec, a, ModelK{}, c);
    const auto expected = tiny_collapse_step(d, k, sample_collapse_branch(d, b));
    CHECK(stepped[0] == doctest::Approx(expected[0]).epsilon(1e-15));
  }
  SUBCASE("fixed-k ignores the spectrum and degenerate spectra freeze model-k") {
    const auto d = BranchDistribution({0.5, 0.5});
    CHECK(evolve_step(d, EnergySpectrum::from_planck({0.4, 0.4}), rng, ModelK{}, c) == d);
    const auto moved = evolve_step(d, Spectrum{}, rng, FixedK{0.1}, c);
    CHECK(std::abs(moved[0] - 0.5) == doctest::Approx(0.05));
  }
  SUBCASE("errors") {
    const auto d = BranchDistribution({0.5, 0.5});
    CHECK_THROWS_AS(evolve_step(d, Spectrum{}, rng, ModelK{}, c), DomainError);
    CHECK_THROWS_AS(evolve_step(d, EnergySpectrum::from_planck({0, 1, 2}), rng, FixedK{0.1}, c), DimensionError);
    CHECK_THROWS_AS(evolve_step(d, Spectrum{}, rng, FixedK{1.5}, c), DomainError);
  }
}

TEST_CASE("coarse graining") {
  const auto d = BranchDistribution({0.2, 0.3, 0.5});
  CHECK(coarse_grain(d, {{0}, {1}, {2}}) == d);
  const auto g = coarse_grain(d, {{0, 1}, {2}});
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == doctest::Approx(0.5));

  SUBCASE("commutes with the tiny collapse") {
    const auto fine_then_grain = coarse_grain(tiny_collapse_step(d, 0.1, 1), {{0, 1}, {2}});
    const auto grain_then_step = tiny_collapse_step(g, 0.1, 0);
    CHECK(fine_then_grain[0] == doctest::Approx(0.55).epsilon(1e-14));
    CHECK(fine_then_grain[1] == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(grain_then_step[0] == doctest::Approx(0.55).epsilon(1e-14));
  }
  SUBCASE("invalid partitions") {
    CHECK_THROWS_AS(coarse_grain(d, {{0, 1}, {1, 2}}), DomainError);
    CHECK_THROWS_AS(coarse_grain(d, {{0, 1}}), DomainError);
    CHECK_THROWS_AS(coarse_grain(d, {{0, 1, 2}, {}}), DomainError);
    CHECK_THROWS_AS(coarse_grain(d, {{0, 1, 3}, {2}}), DomainError);
  }
}

TEST_CASE("coarse-grain commutation property") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + gen() % 7;
    const auto dist = BranchDistribution::normalized(random_simplex(gen, m));
    const std::size_t groups = 1 + gen() % m;
    // random surjective assignment
    std::vector<std::size_t> assign(m);
    for (std::size_t i = 0; i < m; ++i) assign[i] = i < groups ? i : gen() % groups;
    std::shuffle(assign.begin(), assign.end(), gen);
    Partition part(groups);
    for (std::size_t i = 0; i < m; ++i) part[assign[i]].push_back(i);

    const double k = unit(gen);
    const std::size_t chosen = gen() % m;
    const auto a = coarse_grain(tiny_collapse_step(dist, k, chosen), part);
    const auto b = tiny_collapse_step(coarse_grain(dist, part), k, assign[chosen]);
    for (std::size_t g = 0; g < groups; ++g) CHECK(std::abs(a[g] - b[g]) < 1e-12);
  }
}

TEST_CASE("half-decay closed form") {
  CHECK(fixed_k_half_decay_steps(0.1) == doctest::Approx(68.96756393652842).epsilon(1e-12));
  CHECK(fixed_k_half_decay_steps(1.0) == 0.0);
  CHECK(std::isinf(fixed_k_half_decay_steps(0.0)));
}
