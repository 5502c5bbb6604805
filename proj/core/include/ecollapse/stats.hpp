#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ecollapse {

/// Number of unordered pairs i<j among m branches.
constexpr std::size_t pair_count(std::size_t m) noexcept { return m * (m - 1) / 2; }

/// Position of pair (i,j), i<j, in lexicographic order (0,1),(0,2),...,(1,2),...
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t m) noexcept {
  return i * m - i * (i + 1) / 2 + (j - i - 1);
}

/// Streaming mean and sum of squared deviations (Welford), mergeable with
/// Chan's pairwise update. Merging in a fixed order gives bit-identical results.
class RunningMoments {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningMoments& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
  }

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  /// Sample variance; zero with fewer than two samples.
  double variance() const noexcept {
    return count_ > 1 ? std::max(0.0, m2_) / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error() const noexcept {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  bool operator==(const MomentEstimate&) const = default;
};

/// Ensemble estimates of the density-matrix moments at each recorded step:
/// diagonal E[P_i] and cross moments E[P_i P_j] for i<j.
struct EnsembleStats {
  std::size_t branches = 0;
  std::uint64_t trajectories = 0;
  std::vector<std::uint64_t> steps;
  std::vector<std::vector<MomentEstimate>> diagonal;  // [record][branch]
  std::vector<std::vector<MomentEstimate>> cross;     // [record][pair_index]
  std::vector<std::uint64_t> absorbed;                // per branch
  std::uint64_t unabsorbed = 0;

  std::size_t records() const noexcept { return steps.size(); }
  const MomentEstimate& cross_at(std::size_t record, std::size_t i, std::size_t j) const {
    return i < j ? cross[record][pair_index(i, j, branches)] : cross[record][pair_index(j, i, branches)];
  }

  bool operator==(const EnsembleStats&) const = default;
};

/// Per-record moment accumulators for a set of trajectories.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator() = default;
  EnsembleAccumulator(std::size_t branches, std::size_t records);

  void observe(std::size_t record, std::span<const double> probs) noexcept;
  /// `absorbed_branch` < branches, or branches() when the trajectory did not
  /// reach the absorption threshold.
  void finish_trajectory(std::size_t absorbed_branch) noexcept;
  void merge(const EnsembleAccumulator& other);

  std::size_t branches() const noexcept { return branches_; }
  EnsembleStats finalize(std::vector<std::uint64_t> recorded_steps) const;

 private:
  std::size_t branches_ = 0;
  std::size_t records_ = 0;
  std::size_t stride_ = 0;  // moments per record
  std::uint64_t trajectories_ = 0;
  std::vector<RunningMoments> moments_;
  std::vector<std::uint64_t> absorbed_;  // branches_ + 1 slots
};

}  // namespace ecollapse
