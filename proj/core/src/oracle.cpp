#include "ecollapse/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ecollapse/errors.hpp"

namespace ecollapse {

namespace {

// Neumaier compensated sum; the tree has up to 10^7 terms per depth.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

struct Frame {
  std::uint64_t depth;
  double weight;
  std::vector<double> probs;
};

}  // namespace

std::uint64_t event_tree_size(std::size_t branches, std::uint64_t steps) noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  std::uint64_t level = 1;
  for (std::uint64_t d = 0; d < steps; ++d) {
    if (branches != 0 && level > kMax / branches) return kMax;
    level *= branches;
    if (total > kMax - level) return kMax;
    total += level;
  }
  return total;
}

EventTreeMoments enumerate_exact(const BranchDistribution& initial, std::uint64_t steps, const EvolveMode& mode,
                                 const Spectrum& spectrum, const CollapseConstants& constants,
                                 std::uint64_t node_budget) {
  const std::size_t m = initial.size();
  const std::size_t levels = branch_count(spectrum);
  if (levels != 0 && levels != m) throw DimensionError("spectrum and initial distribution differ in length");

  double fixed_k = 0.0;
  std::optional<UncertaintyKernel> kernel;
  if (const auto* fixed = std::get_if<FixedK>(&mode)) {
    if (!(fixed->k >= 0.0 && fixed->k <= 1.0)) throw DomainError("fixed k must lie in [0,1]");
    fixed_k = fixed->k;
  } else if (const auto* single = std::get_if<EnergySpectrum>(&spectrum)) {
    kernel.emplace(*single);
  } else if (const auto* many = std::get_if<ManyBodySpectrum>(&spectrum)) {
    kernel.emplace(*many);
  } else {
    throw DomainError("model-k enumeration needs an energy spectrum");
  }
  const double strength = constants.strength_per_planck_energy();

  const std::uint64_t tree = event_tree_size(m, steps);
  if (tree > node_budget) {
    throw ResourceError("event tree has " + std::to_string(tree) + " nodes, above the budget of " +
                        std::to_string(node_budget));
  }

  const std::size_t pairs = pair_count(m);
  std::vector<std::vector<CompensatedSum>> diag(steps + 1, std::vector<CompensatedSum>(m));
  std::vector<std::vector<CompensatedSum>> cross(steps + 1, std::vector<CompensatedSum>(pairs));
  std::vector<CompensatedSum> weight(steps + 1);

  EventTreeMoments out;
  out.branches = m;

  std::vector<Frame> stack;
  stack.push_back({0, 1.0, initial.vector()});
  while (!stack.empty()) {
    Frame node = std::move(stack.back());
    stack.pop_back();
    ++out.nodes;

    const auto& p = node.probs;
    weight[node.depth].add(node.weight);
    std::size_t pair = 0;
    for (std::size_t i = 0; i < m; ++i) {
      diag[node.depth][i].add(node.weight * p[i]);
      for (std::size_t j = i + 1; j < m; ++j) cross[node.depth][pair++].add(node.weight * p[i] * p[j]);
    }
    if (node.depth == steps) continue;

    const double k = kernel ? std::min(1.0, (*kernel)(p) * strength) : fixed_k;
    for (std::size_t c = m; c-- > 0;) {
      if (!(p[c] > 0.0)) continue;
      Frame child{node.depth + 1, node.weight * p[c], p};
      tiny_collapse_step_inplace(child.probs, k, c);
      stack.push_back(std::move(child));
    }
  }

  out.diagonal.resize(steps + 1);
  out.cross.resize(steps + 1);
  out.weight.resize(steps + 1);
  for (std::uint64_t d = 0; d <= steps; ++d) {
    for (const auto& s : diag[d]) out.diagonal[d].push_back(s.value());
    for (const auto& s : cross[d]) out.cross[d].push_back(s.value());
    out.weight[d] = weight[d].value();
  }
  return out;
}

EnsembleStats to_stats(const EventTreeMoments& moments) {
  EnsembleStats stats;
  stats.branches = moments.branches;
  stats.absorbed.assign(moments.branches, 0);
  for (std::size_t d = 0; d < moments.diagonal.size(); ++d) {
    stats.steps.push_back(d);
    auto& diag = stats.diagonal.emplace_back();
    for (double v : moments.diagonal[d]) diag.push_back({v, 0.0});
    auto& cross = stats.cross.emplace_back();
    for (double v : moments.cross[d]) cross.push_back({v, 0.0});
  }
  return stats;
}

ComparisonReport oracle_compare(const EventTreeMoments& moments, const EnsembleStats& stats, double threshold) {
  if (moments.branches != stats.branches) {
    throw DimensionError("exact moments and ensemble statistics differ in branch count");
  }
  ComparisonReport report;
  report.threshold = threshold;
  if (stats.records() == 0) return report;

  for (std::size_t r = 0; r < stats.records(); ++r) {
    const std::uint64_t step = stats.steps[r];
    if (step > moments.steps()) {
      throw DimensionError("ensemble recorded step " + std::to_string(step) + " is beyond the enumerated depth");
    }
    auto add = [&](std::string name, const MomentEstimate& mc, double exact) {
      const double z = z_score(mc.mean, exact, mc.std_error);
      report.max_z = std::max(report.max_z, z);
      report.max_abs_diff = std::max(report.max_abs_diff, std::abs(mc.mean - exact));
      report.entries.push_back({step, std::move(name), mc.mean, exact, z});
    };
    for (std::size_t i = 0; i < stats.branches; ++i) {
      add("P" + std::to_string(i), stats.diagonal[r][i], moments.diagonal[step][i]);
    }
    for (std::size_t i = 0; i < stats.branches; ++i) {
      for (std::size_t j = i + 1; j < stats.branches; ++j) {
        add("P" + std::to_string(i) + "P" + std::to_string(j), stats.cross_at(r, i, j),
            moments.cross_at(step, i, j));
      }
    }
  }
  report.verdict = report.max_z < threshold ? Verdict::Pass : Verdict::Fail;
  return report;
}

}  // namespace ecollapse
