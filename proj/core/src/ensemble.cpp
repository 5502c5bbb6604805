#include "ecollapse/ensemble.hpp"

#include <fmt/format.h>

#include <string>

namespace ecollapse {

EnsembleAccumulator::EnsembleAccumulator(std::size_t branches, std::size_t records)
    : branches_(branches),
      records_(records),
      stride_(branches + pair_count(branches)),
      moments_(records * (branches + pair_count(branches))),
      absorbed_(branches + 1, 0) {}

void EnsembleAccumulator::observe(std::size_t record, std::span<const double> probs) noexcept {
  RunningMoments* slot = moments_.data() + record * stride_;
  for (std::size_t i = 0; i < branches_; ++i) slot[i].add(probs[i]);
  RunningMoments* cross = slot + branches_;
  for (std::size_t i = 0; i < branches_; ++i) {
    for (std::size_t j = i + 1; j < branches_; ++j) (cross++)->add(probs[i] * probs[j]);
  }
}

void EnsembleAccumulator::finish_trajectory(std::size_t absorbed_branch) noexcept {
  ++trajectories_;
  ++absorbed_[std::min(absorbed_branch, branches_)];
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
  if (other.branches_ != branches_ || other.records_ != records_) {
    throw DimensionError("cannot merge ensemble accumulators of different shapes");
  }
  for (std::size_t i = 0; i < moments_.size(); ++i) moments_[i].merge(other.moments_[i]);
  for (std::size_t i = 0; i < absorbed_.size(); ++i) absorbed_[i] += other.absorbed_[i];
  trajectories_ += other.trajectories_;
}

EnsembleStats EnsembleAccumulator::finalize(std::vector<std::uint64_t> recorded_steps) const {
  if (recorded_steps.size() != records_) {
    throw DimensionError("recorded step list does not match accumulator records");
  }
  EnsembleStats stats;
  stats.branches = branches_;
  stats.trajectories = trajectories_;
  stats.steps = std::move(recorded_steps);
  stats.diagonal.resize(records_);
  stats.cross.resize(records_);
  for (std::size_t r = 0; r < records_; ++r) {
    const RunningMoments* slot = moments_.data() + r * stride_;
    auto& diag = stats.diagonal[r];
    diag.reserve(branches_);
    for (std::size_t i = 0; i < branches_; ++i) diag.push_back({slot[i].mean(), slot[i].std_error()});
    auto& cross = stats.cross[r];
    cross.reserve(pair_count(branches_));
    for (std::size_t p = 0; p < pair_count(branches_); ++p) {
      const auto& m = slot[branches_ + p];
      cross.push_back({m.mean(), m.std_error()});
    }
  }
  stats.absorbed.assign(absorbed_.begin(), absorbed_.begin() + static_cast<std::ptrdiff_t>(branches_));
  stats.unabsorbed = absorbed_[branches_];
  return stats;
}

void RunConfig::validate() const {
  const std::size_t m = initial.size();
  const std::size_t levels = branch_count(spectrum);
  if (levels != 0 && levels != m) {
    throw DimensionError("initial distribution has " + std::to_string(m) + " branches but spectrum has " +
                         std::to_string(levels));
  }
  if (const auto* fixed = std::get_if<FixedK>(&mode)) {
    if (!(fixed->k >= 0.0 && fixed->k <= 1.0)) throw DomainError("fixed k must lie in [0,1]");
  } else if (levels == 0) {
    throw DomainError("model-k mode needs an energy spectrum");
  }
  if (steps == 0) throw DomainError("steps must be positive");
  if (trajectories == 0) throw DomainError("trajectories must be positive");
  if (record_stride == 0) throw DomainError("record_stride must be positive");
  if (!(absorption_threshold > 0.0 && absorption_threshold < 1.0)) {
    throw DomainError("absorption_threshold must lie in (0,1)");
  }
  if (observe_groups) validate_partition(*observe_groups, m);
}

void RunConfig::check_budget() const {
  const double work = static_cast<double>(steps) * static_cast<double>(trajectories);
  if (work > step_budget) {
    throw ResourceError(fmt::format("steps x trajectories = {:.3g} exceeds the step budget of {:.3g}", work,
                                    step_budget));
  }
}

std::vector<std::uint64_t> RunConfig::recorded_steps() const {
  std::vector<std::uint64_t> out(records());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = r * record_stride;
  return out;
}

namespace detail {

PreparedRun::PreparedRun(const RunConfig& config) : observed(config.observed_branches()) {
  if (const auto* fixed = std::get_if<FixedK>(&config.mode)) {
    fixed_k = fixed->k;
  } else {
    strength = config.constants.strength_per_planck_energy();
    if (const auto* single = std::get_if<EnergySpectrum>(&config.spectrum)) {
      kernel.emplace(*single);
    } else if (const auto* many = std::get_if<ManyBodySpectrum>(&config.spectrum)) {
      kernel.emplace(*many);
    }
  }
  if (config.observe_groups) group_of = group_lookup(*config.observe_groups, config.initial.size());
}

}  // namespace detail

Trajectory run_trajectory(const RunConfig& config, std::uint64_t trajectory_index) {
  config.validate();
  if (static_cast<double>(config.steps) > config.step_budget) {
    throw ResourceError("steps exceed the step budget");
  }
  const detail::PreparedRun prep(config);
  Trajectory out;
  DefaultStepRule step;
  const std::uint64_t stride = config.record_stride;
  auto absorbed = detail::simulate_trajectory(
      config, prep, trajectory_index, step, [&](std::size_t record, std::span<const double> probs, bool frozen) {
        if (frozen) return;
        out.steps.push_back(record * stride);
        out.snapshots.push_back(make_distribution_unchecked(std::vector<double>(probs.begin(), probs.end())));
      });
  if (absorbed) {
    out.absorbed_branch = absorbed->first;
    out.absorption_step = absorbed->second;
  }
  return out;
}

EnsembleStats run_ensemble(const RunConfig& config, unsigned threads) {
  return run_ensemble_with(config, threads, DefaultStepRule{});
}

}  // namespace ecollapse
