#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecollapse/stats.hpp"

namespace ecollapse {

enum class Verdict { Pass, Fail, Insufficient };
std::string_view to_string(Verdict v) noexcept;

/// |observed - expected| / std_error. A zero standard error gives 0 when the
/// difference is within `exact_tolerance` and +infinity otherwise.
double z_score(double observed, double expected, double std_error, double exact_tolerance = 1e-12) noexcept;

/// Interpolated step at which the mean cross moment E[P_i P_j] first falls to
/// half its value at the first recorded step. nullopt when the series never
/// gets there ("not yet collapsed"). Throws DomainError for i == j or a zero
/// initial cross moment, DimensionError for out-of-range indices.
std::optional<double> estimate_half_decay(const EnsembleStats& stats, std::size_t i, std::size_t j);

struct MartingaleReport {
  Verdict verdict = Verdict::Insufficient;
  double threshold = 5.0;
  double max_z = 0.0;
  std::uint64_t worst_step = 0;
  std::size_t worst_branch = 0;
  std::size_t checked = 0;
  std::string note;
};

/// z-scores of |E[P_i](step) - P_i(0)| over every branch and recorded step.
/// PASS iff max |z| < threshold; fewer than two trajectories is Insufficient.
MartingaleReport martingale_test(const EnsembleStats& stats, double threshold = 5.0);

struct DecayFitReport {
  Verdict verdict = Verdict::Insufficient;
  double fitted_rate = 0.0;    // slope of log E[P_i P_j] per step
  double expected_rate = 0.0;  // ln(1 - k^2)
  double rate_tolerance = 0.02;
  double intercept = 0.0;
  double expected_intercept = 0.0;
  double intercept_z = 0.0;
  std::size_t points = 0;
  std::string note;
};

/// Weighted least-squares fit of log E[P_i P_j] against the step count, with
/// weights from the relative standard errors. PASS iff the fitted rate is
/// within rate_tolerance (relative) of ln(1-k^2) and the intercept within
/// z_threshold standard errors of log(P_i(0) P_j(0)).
DecayFitReport decay_fit_test(const EnsembleStats& stats, std::size_t i, std::size_t j, double k,
                              double rate_tolerance = 0.02, double z_threshold = 5.0);

struct ComparisonEntry {
  std::uint64_t step = 0;
  std::string moment;  // "P0", "P0P1", ...
  double observed = 0.0;
  double reference = 0.0;
  double z = 0.0;
};

struct ComparisonReport {
  Verdict verdict = Verdict::Insufficient;
  double threshold = 5.0;
  double max_z = 0.0;
  double max_abs_diff = 0.0;
  std::vector<ComparisonEntry> entries;
};

/// Two-sample comparison of two independent ensembles with identical shape:
/// z = |a - b| / sqrt(se_a^2 + se_b^2) for every moment and recorded step.
ComparisonReport compare_ensembles(const EnsembleStats& a, const EnsembleStats& b, double threshold = 5.0);

/// Fraction of trajectories absorbed in `branch` against an expected
/// probability, in binomial standard errors.
struct BornReport {
  Verdict verdict = Verdict::Insufficient;
  double fraction = 0.0;
  double expected = 0.0;
  double z = 0.0;
  double threshold = 3.0;
  std::uint64_t absorbed = 0;
  std::uint64_t trajectories = 0;
};
BornReport born_statistics_test(const EnsembleStats& stats, std::size_t branch, double expected,
                                double threshold = 3.0);

}  // namespace ecollapse
