#include "ecollapse/distribution.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ecollapse/errors.hpp"

namespace ecollapse {

void renormalize(std::span<double> probs) noexcept {
  bool clamped = false;
  for (double& p : probs) {
    if (p < 0.0) {
      p = 0.0;
      clamped = true;
    }
  }
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if ((clamped || std::abs(sum - 1.0) > kSimplexTolerance) && sum > 0.0) {
    for (double& p : probs) p /= sum;
  }
}

bool is_on_simplex(std::span<const double> probs, double tolerance) noexcept {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return !probs.empty() && std::abs(sum - 1.0) <= tolerance;
}

BranchDistribution::BranchDistribution(std::vector<double> probs, double sum_tolerance)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw DimensionError("branch distribution needs at least one branch");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw DomainError("probability P" + std::to_string(i) + " = " + std::to_string(p) +
                        " is outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > sum_tolerance) {
    throw DomainError("probabilities sum to " + std::to_string(sum) +
                      "; normalization requires a sum of 1");
  }
  renormalize(probs_);
}

BranchDistribution BranchDistribution::normalized(std::vector<double> weights) {
  if (weights.empty()) throw DimensionError("branch distribution needs at least one branch");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("weights must be finite and non-negative");
    sum += w;
  }
  if (sum <= 0.0) throw DomainError("weights must have a positive sum");
  for (double& w : weights) w /= sum;
  renormalize(weights);
  return BranchDistribution(Trusted{}, std::move(weights));
}

BranchDistribution BranchDistribution::vertex(std::size_t size, std::size_t index) {
  if (index >= size) throw DimensionError("vertex index out of range");
  std::vector<double> p(size, 0.0);
  p[index] = 1.0;
  return BranchDistribution(Trusted{}, std::move(p));
}

BranchDistribution BranchDistribution::uniform(std::size_t size) {
  return normalized(std::vector<double>(size, 1.0));
}

BranchDistribution make_distribution_unchecked(std::vector<double> probs) {
  return BranchDistribution(BranchDistribution::Trusted{}, std::move(probs));
}

}  // namespace ecollapse
