#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "ecollapse/constants.hpp"
#include "ecollapse/distribution.hpp"
#include "ecollapse/random.hpp"
#include "ecollapse/spectrum.hpp"

namespace ecollapse {

// ---------------------------------------------------------------------------
// Energy uncertainty
// ---------------------------------------------------------------------------

/// dE = 1/2 sum_{i,j} P_i P_j |E_i - E_j|. Throws DimensionError on a length
/// mismatch.
Energy energy_uncertainty(const BranchDistribution& dist, const EnergySpectrum& spectrum);

/// Sum of the per-subsystem uncertainties,
/// dE = 1/2 sum_l sum_{i,j} P_i P_j |E_li - E_lj|.
Energy energy_uncertainty_many_body(const BranchDistribution& dist, const ManyBodySpectrum& spectrum);

/// Direct pairwise sum on raw spans (units of the input energies). O(m^2).
double pairwise_uncertainty(std::span<const double> probs, std::span<const double> energies);

/// Evaluates the same quantity as energy_uncertainty_many_body in O(n*m) per
/// call by visiting each subsystem's levels in ascending order:
///   sum_{a<b} p_a p_b (E_b - E_a) = sum_b p_b (E_b * C_{b-1} - S_{b-1})
/// with C and S the running sums of p and p*E over the sorted prefix.
class UncertaintyKernel {
 public:
  explicit UncertaintyKernel(const EnergySpectrum& spectrum);
  explicit UncertaintyKernel(const ManyBodySpectrum& spectrum);

  std::size_t branches() const noexcept { return branches_; }
  /// Result in units of E_P.
  double operator()(std::span<const double> probs) const noexcept;

 private:
  std::size_t branches_ = 0;
  // Per subsystem: branch indices sorted by energy, and the sorted energies.
  std::vector<std::size_t> order_;
  std::vector<double> sorted_energy_;
};

// ---------------------------------------------------------------------------
// Strength and time scales
// ---------------------------------------------------------------------------

/// k = dE * t_P / hbar, clamped to 1. Throws DomainError for dE < 0.
double collapse_strength(Energy delta_e, const CollapseConstants& constants = {});

/// tau_c = hbar * E_P / dE^2 in seconds; +infinity when dE == 0 (no collapse).
double collapse_time_estimate(Energy delta_e, const CollapseConstants& constants = {});

/// Steps n at which (1 - k^2)^n = 1/2. Zero for k == 1, +infinity for k == 0.
double fixed_k_half_decay_steps(double k);

// ---------------------------------------------------------------------------
// Stochastic update
// ---------------------------------------------------------------------------

/// Cumulative-sum inversion of a uniform draw u in [0,1): returns the first i
/// with u < P_0 + ... + P_i, so a draw exactly on a boundary goes to the later
/// bucket. Residual rounding mass falls to the last branch with P_i > 0.
std::size_t sample_collapse_branch(std::span<const double> probs, double u) noexcept;
std::size_t sample_collapse_branch(const BranchDistribution& dist, RandomStream& rng);

/// P_c <- P_c + k (1 - P_c), P_j <- P_j (1 - k) for j != c, then renormalize.
/// The in-place form assumes validated arguments.
void tiny_collapse_step_inplace(std::span<double> probs, double k, std::size_t chosen) noexcept;
BranchDistribution tiny_collapse_step(const BranchDistribution& dist, double k, std::size_t chosen);

struct ModelK {};
struct FixedK {
  double k = 0.0;
};
/// model-k derives k from the current energy uncertainty each step; fixed-k
/// holds k constant.
using EvolveMode = std::variant<ModelK, FixedK>;

using Spectrum = std::variant<std::monostate, EnergySpectrum, ManyBodySpectrum>;

/// Branch count of a spectrum, 0 for monostate.
std::size_t branch_count(const Spectrum& spectrum) noexcept;

/// One Planck instant: determine k (from the mode), sample the branch, apply
/// the tiny collapse. model-k requires a non-empty spectrum.
BranchDistribution evolve_step(const BranchDistribution& dist, const Spectrum& spectrum,
                               RandomStream& rng, const EvolveMode& mode,
                               const CollapseConstants& constants = {});

// ---------------------------------------------------------------------------
// Coarse graining
// ---------------------------------------------------------------------------

using Partition = std::vector<std::vector<std::size_t>>;

/// Throws DomainError unless `groups` are non-empty, disjoint and cover
/// 0..size-1.
void validate_partition(const Partition& groups, std::size_t size);

/// Group index for every branch index. Assumes a validated partition.
std::vector<std::size_t> group_lookup(const Partition& groups, std::size_t size);

/// Group probabilities are the sums of their members.
BranchDistribution coarse_grain(const BranchDistribution& dist, const Partition& groups);

}  // namespace ecollapse
