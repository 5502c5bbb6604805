#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ecollapse/analysis.hpp"
#include "ecollapse/constants.hpp"
#include "ecollapse/distribution.hpp"
#include "ecollapse/dynamics.hpp"
#include "ecollapse/stats.hpp"

namespace ecollapse {

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Exact expectations over every event sequence, depth 0..steps.
struct EventTreeMoments {
  std::size_t branches = 0;
  std::vector<std::vector<double>> diagonal;  // [depth][branch] E[P_i]
  std::vector<std::vector<double>> cross;     // [depth][pair_index] E[P_i P_j]
  std::vector<double> weight;                 // [depth] total path probability
  std::uint64_t nodes = 0;

  std::size_t steps() const noexcept { return diagonal.empty() ? 0 : diagonal.size() - 1; }
  double cross_at(std::size_t depth, std::size_t i, std::size_t j) const {
    return i < j ? cross[depth][pair_index(i, j, branches)] : cross[depth][pair_index(j, i, branches)];
  }
};

/// Upper bound on the nodes of a full m-ary event tree of the given depth,
/// saturating at UINT64_MAX.
std::uint64_t event_tree_size(std::size_t branches, std::uint64_t steps) noexcept;

/// Depth-first walk over all event sequences with an explicit stack, weighting
/// each node by the product of the branch probabilities along its path.
/// Branches with zero probability are not expanded (their weight is zero).
/// Throws ResourceError when the full tree would exceed `node_budget` nodes.
EventTreeMoments enumerate_exact(const BranchDistribution& initial, std::uint64_t steps, const EvolveMode& mode,
                                 const Spectrum& spectrum = {}, const CollapseConstants& constants = {},
                                 std::uint64_t node_budget = kDefaultNodeBudget);

/// The exact moments in the EnsembleStats layout (zero standard errors), for
/// writing with the same CSV schema.
EnsembleStats to_stats(const EventTreeMoments& moments);

/// Monte Carlo estimates against exact moments at each recorded step. PASS iff
/// every |z| < threshold; no recorded steps gives Insufficient.
ComparisonReport oracle_compare(const EventTreeMoments& moments, const EnsembleStats& stats,
                                double threshold = 5.0);

}  // namespace ecollapse
