#pragma once

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "ecollapse/constants.hpp"
#include "ecollapse/distribution.hpp"
#include "ecollapse/dynamics.hpp"
#include "ecollapse/errors.hpp"
#include "ecollapse/random.hpp"
#include "ecollapse/stats.hpp"

namespace ecollapse {

inline constexpr double kDefaultAbsorptionThreshold = 1.0 - 1e-9;
inline constexpr double kDefaultStepBudget = 1e10;

struct RunConfig {
  BranchDistribution initial = BranchDistribution::vertex(1, 0);
  Spectrum spectrum{};
  EvolveMode mode = FixedK{0.0};
  std::uint64_t steps = 1;
  std::uint64_t trajectories = 1;
  std::uint64_t base_seed = 0;
  std::uint64_t record_stride = 1;
  double absorption_threshold = kDefaultAbsorptionThreshold;
  /// Upper bound on steps * trajectories.
  double step_budget = kDefaultStepBudget;
  /// When set, statistics are accumulated on the coarse-grained distribution.
  std::optional<Partition> observe_groups{};
  CollapseConstants constants{};

  /// Throws DimensionError/DomainError for inconsistent settings.
  void validate() const;
  /// Throws ResourceError when steps * trajectories exceeds step_budget.
  void check_budget() const;

  std::size_t records() const noexcept { return static_cast<std::size_t>(steps / record_stride) + 1; }
  std::vector<std::uint64_t> recorded_steps() const;
  std::size_t observed_branches() const noexcept {
    return observe_groups ? observe_groups->size() : initial.size();
  }
};

struct Trajectory {
  /// Snapshots at multiples of record_stride, up to the absorption step. Later
  /// recorded steps equal the last snapshot.
  std::vector<std::uint64_t> steps;
  std::vector<BranchDistribution> snapshots;
  std::optional<std::size_t> absorbed_branch;
  std::optional<std::uint64_t> absorption_step;
};

/// Signature of the per-instant update used by the engine. The default is
/// tiny_collapse_step_inplace; tests substitute deliberately wrong rules.
template <class F>
concept StepRule = std::invocable<F&, std::span<double>, double, std::size_t>;

struct DefaultStepRule {
  void operator()(std::span<double> probs, double k, std::size_t chosen) const noexcept {
    tiny_collapse_step_inplace(probs, k, chosen);
  }
};

Trajectory run_trajectory(const RunConfig& config, std::uint64_t trajectory_index);

/// threads == 0 uses the hardware concurrency. Output is identical for every
/// thread count.
EnsembleStats run_ensemble(const RunConfig& config, unsigned threads = 1);

namespace detail {

inline constexpr std::uint64_t kTrajectoriesPerBlock = 64;

/// Per-run data shared read-only by all trajectories.
struct PreparedRun {
  explicit PreparedRun(const RunConfig& config);

  std::optional<UncertaintyKernel> kernel;
  double fixed_k = 0.0;
  double strength = 0.0;
  std::vector<std::size_t> group_of;  // empty when observing fine branches
  std::size_t observed = 0;
};

/// Runs one trajectory. `observe(record, probs, frozen)` is called for every
/// recorded step in order; after absorption the final state is reported with
/// frozen == true. Returns the absorbed branch (fine index) if any, with the
/// step it happened at.
template <StepRule Step, class Observer>
std::optional<std::pair<std::size_t, std::uint64_t>> simulate_trajectory(const RunConfig& config,
                                                                         const PreparedRun& prep,
                                                                         std::uint64_t index, Step& step,
                                                                         Observer&& observe) {
  RandomStream rng(trajectory_seed(config.base_seed, index));
  std::vector<double> probs(config.initial.probs().begin(), config.initial.probs().end());

  auto absorbed_at = [&]() -> std::optional<std::size_t> {
    const auto it = std::max_element(probs.begin(), probs.end());
    if (*it >= config.absorption_threshold) return static_cast<std::size_t>(it - probs.begin());
    return std::nullopt;
  };

  const std::size_t records = config.records();
  std::size_t next_record = 0;
  observe(next_record++, std::span<const double>(probs), false);

  std::optional<std::pair<std::size_t, std::uint64_t>> absorbed;
  if (auto b = absorbed_at()) absorbed.emplace(*b, 0);

  for (std::uint64_t s = 1; s <= config.steps && !absorbed; ++s) {
    const double k = prep.kernel ? std::min(1.0, (*prep.kernel)(probs) * prep.strength) : prep.fixed_k;
    const std::size_t chosen = sample_collapse_branch(probs, rng.uniform());
    step(std::span<double>(probs), k, chosen);
    if (s % config.record_stride == 0) observe(next_record++, std::span<const double>(probs), false);
    if (auto b = absorbed_at()) absorbed.emplace(*b, s);
  }
  while (next_record < records) observe(next_record++, std::span<const double>(probs), true);
  return absorbed;
}

template <StepRule Step>
EnsembleAccumulator run_block(const RunConfig& config, const PreparedRun& prep, std::uint64_t first,
                              std::uint64_t last, Step step) {
  EnsembleAccumulator acc(prep.observed, config.records());
  std::vector<double> coarse(prep.observed);
  for (std::uint64_t t = first; t < last; ++t) {
    auto absorbed = simulate_trajectory(config, prep, t, step,
                                        [&](std::size_t record, std::span<const double> probs, bool) {
                                          if (prep.group_of.empty()) {
                                            acc.observe(record, probs);
                                            return;
                                          }
                                          std::fill(coarse.begin(), coarse.end(), 0.0);
                                          for (std::size_t i = 0; i < probs.size(); ++i) {
                                            coarse[prep.group_of[i]] += probs[i];
                                          }
                                          acc.observe(record, coarse);
                                        });
    std::size_t slot = prep.observed;
    if (absorbed) slot = prep.group_of.empty() ? absorbed->first : prep.group_of[absorbed->first];
    acc.finish_trajectory(slot);
  }
  return acc;
}

}  // namespace detail

/// Runs the ensemble with a custom step rule. Trajectories are processed in
/// fixed-size blocks pulled from a shared counter; finished blocks are merged
/// strictly in block order, so the floating-point reduction never depends on
/// the number of workers.
template <StepRule Step>
EnsembleStats run_ensemble_with(const RunConfig& config, unsigned threads, Step step) {
  config.validate();
  config.check_budget();
  const detail::PreparedRun prep(config);

  const std::uint64_t blocks =
      (config.trajectories + detail::kTrajectoriesPerBlock - 1) / detail::kTrajectoriesPerBlock;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

  EnsembleAccumulator total(prep.observed, config.records());
  std::atomic<std::uint64_t> next_block{0};
  std::mutex merge_mutex;
  std::map<std::uint64_t, EnsembleAccumulator> pending;
  std::uint64_t next_merge = 0;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto work = [&] {
    try {
      for (std::uint64_t b = next_block++; b < blocks && !failed; b = next_block++) {
        const std::uint64_t first = b * detail::kTrajectoriesPerBlock;
        const std::uint64_t last = std::min(config.trajectories, first + detail::kTrajectoriesPerBlock);
        auto acc = detail::run_block(config, prep, first, last, step);
        std::lock_guard lock(merge_mutex);
        pending.emplace(b, std::move(acc));
        for (auto it = pending.find(next_merge); it != pending.end(); it = pending.find(next_merge)) {
          total.merge(it->second);
          pending.erase(it);
          ++next_merge;
        }
      }
    } catch (...) {
      std::lock_guard lock(merge_mutex);
      if (!failure) failure = std::current_exception();
      failed = true;
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return total.finalize(config.recorded_steps());
}

}  // namespace ecollapse
