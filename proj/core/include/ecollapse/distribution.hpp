#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecollapse {

inline constexpr double kSimplexTolerance = 1e-12;

/// Restores a probability vector to the simplex after floating-point drift:
/// negative entries are clamped to zero, and the vector is rescaled whenever
/// its sum is off by more than kSimplexTolerance.
void renormalize(std::span<double> probs) noexcept;

/// True iff every entry is in [0,1] and the sum is within `tolerance` of one.
bool is_on_simplex(std::span<const double> probs, double tolerance = kSimplexTolerance) noexcept;

/// Branch probabilities P_i = |c_i|^2. Always a valid point of the simplex.
class BranchDistribution {
 public:
  /// Accepts vectors whose sum is within `sum_tolerance` of one and
  /// renormalizes the remainder. Throws DomainError otherwise, or on
  /// negative/non-finite entries, and DimensionError when empty.
  explicit BranchDistribution(std::vector<double> probs, double sum_tolerance = 1e-9);

  /// Rescales any non-negative vector with a positive sum.
  static BranchDistribution normalized(std::vector<double> weights);
  static BranchDistribution vertex(std::size_t size, std::size_t index);
  static BranchDistribution uniform(std::size_t size);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<double>& vector() const noexcept { return probs_; }

  bool operator==(const BranchDistribution&) const = default;

 private:
  struct Trusted {};
  BranchDistribution(Trusted, std::vector<double> probs) : probs_(std::move(probs)) {}
  friend BranchDistribution make_distribution_unchecked(std::vector<double> probs);

  std::vector<double> probs_;
};

/// For internal callers that have just renormalized `probs` themselves.
BranchDistribution make_distribution_unchecked(std::vector<double> probs);

}  // namespace ecollapse
