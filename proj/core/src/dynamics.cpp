#include "ecollapse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ecollapse/errors.hpp"

namespace ecollapse {

namespace {

void require_same_length(std::size_t probs, std::size_t levels) {
  if (probs != levels) {
    throw DimensionError("distribution has " + std::to_string(probs) + " branches but spectrum has " +
                         std::to_string(levels));
  }
}

void require_k(double k) {
  if (!(k >= 0.0 && k <= 1.0)) {
    throw DomainError("collapse strength k = " + std::to_string(k) + " is outside [0,1]");
  }
}

}  // namespace

double pairwise_uncertainty(std::span<const double> probs, std::span<const double> energies) {
  require_same_length(probs.size(), energies.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    for (std::size_t j = i + 1; j < probs.size(); ++j) {
      sum += probs[i] * probs[j] * std::abs(energies[i] - energies[j]);
    }
  }
  return sum;
}

Energy energy_uncertainty(const BranchDistribution& dist, const EnergySpectrum& spectrum) {
  return Energy::from_planck(pairwise_uncertainty(dist.probs(), spectrum.planck()));
}

Energy energy_uncertainty_many_body(const BranchDistribution& dist, const ManyBodySpectrum& spectrum) {
  require_same_length(dist.size(), spectrum.branches());
  double sum = 0.0;
  for (std::size_t l = 0; l < spectrum.subsystems(); ++l) {
    sum += pairwise_uncertainty(dist.probs(), spectrum.row(l));
  }
  return Energy::from_planck(sum);
}

UncertaintyKernel::UncertaintyKernel(const EnergySpectrum& spectrum) : branches_(spectrum.size()) {
  order_.resize(branches_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  auto levels = spectrum.planck();
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
  sorted_energy_.reserve(branches_);
  for (std::size_t idx : order_) sorted_energy_.push_back(levels[idx]);
}

UncertaintyKernel::UncertaintyKernel(const ManyBodySpectrum& spectrum) : branches_(spectrum.branches()) {
  order_.reserve(spectrum.subsystems() * branches_);
  sorted_energy_.reserve(spectrum.subsystems() * branches_);
  std::vector<std::size_t> row_order(branches_);
  for (std::size_t l = 0; l < spectrum.subsystems(); ++l) {
    auto levels = spectrum.row(l);
    std::iota(row_order.begin(), row_order.end(), std::size_t{0});
    std::stable_sort(row_order.begin(), row_order.end(),
                     [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
    for (std::size_t idx : row_order) {
      order_.push_back(idx);
      sorted_energy_.push_back(levels[idx]);
    }
  }
}

double UncertaintyKernel::operator()(std::span<const double> probs) const noexcept {
  double total = 0.0;
  for (std::size_t base = 0; base < order_.size(); base += branches_) {
    double cum_p = 0.0;
    double cum_pe = 0.0;
    for (std::size_t s = base; s < base + branches_; ++s) {
      const double p = probs[order_[s]];
      const double e = sorted_energy_[s];
      total += p * (e * cum_p - cum_pe);
      cum_p += p;
      cum_pe += p * e;
    }
  }
  // Rounding in e*C - S can leave a tiny negative for degenerate levels.
  return total > 0.0 ? total : 0.0;
}

double collapse_strength(Energy delta_e, const CollapseConstants& constants) {
  const double de = delta_e.planck();
  if (!(de >= 0.0)) throw DomainError("energy uncertainty must be non-negative");
  return std::min(1.0, de * constants.strength_per_planck_energy());
}

double collapse_time_estimate(Energy delta_e, const CollapseConstants& constants) {
  const double de_ev = delta_e.eV(constants);
  if (!(de_ev >= 0.0)) throw DomainError("energy uncertainty must be non-negative");
  if (de_ev == 0.0) return std::numeric_limits<double>::infinity();
  return constants.hbar() * constants.planck_energy() / (de_ev * de_ev);
}

double fixed_k_half_decay_steps(double k) {
  require_k(k);
  if (k == 0.0) return std::numeric_limits<double>::infinity();
  if (k == 1.0) return 0.0;
  return std::log(2.0) / -std::log1p(-k * k);
}

std::size_t sample_collapse_branch(std::span<const double> probs, double u) noexcept {
  double cumulative = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_nonzero = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last_nonzero;
}

std::size_t sample_collapse_branch(const BranchDistribution& dist, RandomStream& rng) {
  return sample_collapse_branch(dist.probs(), rng.uniform());
}

void tiny_collapse_step_inplace(std::span<double> probs, double k, std::size_t chosen) noexcept {
  const double keep = 1.0 - k;
  for (double& p : probs) p *= keep;
  probs[chosen] += k;
  renormalize(probs);
}

BranchDistribution tiny_collapse_step(const BranchDistribution& dist, double k, std::size_t chosen) {
  require_k(k);
  if (chosen >= dist.size()) throw DimensionError("chosen branch index out of range");
  auto next = dist.vector();
  tiny_collapse_step_inplace(next, k, chosen);
  return make_distribution_unchecked(std::move(next));
}

std::size_t branch_count(const Spectrum& spectrum) noexcept {
  struct Visitor {
    std::size_t operator()(std::monostate) const { return 0; }
    std::size_t operator()(const EnergySpectrum& s) const { return s.size(); }
    std::size_t operator()(const ManyBodySpectrum& s) const { return s.branches(); }
  };
  return std::visit(Visitor{}, spectrum);
}

BranchDistribution evolve_step(const BranchDistribution& dist, const Spectrum& spectrum,
                               RandomStream& rng, const EvolveMode& mode,
                               const CollapseConstants& constants) {
  const std::size_t levels = branch_count(spectrum);
  if (levels != 0) require_same_length(dist.size(), levels);

  double k = 0.0;
  if (const auto* fixed = std::get_if<FixedK>(&mode)) {
    require_k(fixed->k);
    k = fixed->k;
  } else {
    Energy de;
    if (const auto* single = std::get_if<EnergySpectrum>(&spectrum)) {
      de = energy_uncertainty(dist, *single);
    } else if (const auto* many = std::get_if<ManyBodySpectrum>(&spectrum)) {
      de = energy_uncertainty_many_body(dist, *many);
    } else {
      throw DomainError("model-k evolution needs an energy spectrum");
    }
    k = collapse_strength(de, constants);
  }

  const std::size_t chosen = sample_collapse_branch(dist, rng);
  auto next = dist.vector();
  tiny_collapse_step_inplace(next, k, chosen);
  return make_distribution_unchecked(std::move(next));
}

void validate_partition(const Partition& groups, std::size_t size) {
  std::vector<bool> seen(size, false);
  std::size_t covered = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw DomainError("partition group " + std::to_string(g) + " is empty");
    for (std::size_t idx : groups[g]) {
      if (idx >= size) {
        throw DomainError("partition index " + std::to_string(idx) + " is out of range");
      }
      if (seen[idx]) throw DomainError("partition groups overlap at index " + std::to_string(idx));
      seen[idx] = true;
      ++covered;
    }
  }
  if (covered != size) throw DomainError("partition does not cover every branch");
}

std::vector<std::size_t> group_lookup(const Partition& groups, std::size_t size) {
  std::vector<std::size_t> lookup(size, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t idx : groups[g]) lookup[idx] = g;
  }
  return lookup;
}

BranchDistribution coarse_grain(const BranchDistribution& dist, const Partition& groups) {
  validate_partition(groups, dist.size());
  std::vector<double> coarse(groups.size(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t idx : groups[g]) coarse[g] += dist[idx];
  }
  renormalize(coarse);
  return make_distribution_unchecked(std::move(coarse));
}

}  // namespace ecollapse
