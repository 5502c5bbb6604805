#include "ecollapse/analysis.hpp"

#include <cmath>
#include <limits>

#include "ecollapse/errors.hpp"

namespace ecollapse {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Insufficient: return "INSUFFICIENT";
  }
  return "?";
}

double z_score(double observed, double expected, double std_error, double exact_tolerance) noexcept {
  const double diff = std::abs(observed - expected);
  if (std_error > 0.0) return diff / std_error;
  return diff <= exact_tolerance ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {

void require_pair(const EnsembleStats& stats, std::size_t i, std::size_t j) {
  if (i >= stats.branches || j >= stats.branches) throw DimensionError("branch index out of range");
  if (i == j) throw DomainError("a diagonal element is not a cross moment; choose i != j");
}

}  // namespace

std::optional<double> estimate_half_decay(const EnsembleStats& stats, std::size_t i, std::size_t j) {
  require_pair(stats, i, j);
  if (stats.records() == 0) return std::nullopt;
  const double initial = stats.cross_at(0, i, j).mean;
  if (!(initial > 0.0)) throw DomainError("initial cross moment is zero; the half-decay is undefined");
  const double target = 0.5 * initial;
  for (std::size_t r = 1; r < stats.records(); ++r) {
    const double now = stats.cross_at(r, i, j).mean;
    if (now <= target) {
      const double before = stats.cross_at(r - 1, i, j).mean;
      const double s0 = static_cast<double>(stats.steps[r - 1]);
      const double s1 = static_cast<double>(stats.steps[r]);
      const double frac = before > now ? (before - target) / (before - now) : 1.0;
      return s0 + frac * (s1 - s0);
    }
  }
  return std::nullopt;
}

MartingaleReport martingale_test(const EnsembleStats& stats, double threshold) {
  MartingaleReport report;
  report.threshold = threshold;
  if (stats.trajectories < 2 || stats.records() == 0) {
    report.verdict = Verdict::Insufficient;
    report.note = "insufficient statistics: need at least two trajectories";
    return report;
  }
  const auto& initial = stats.diagonal.front();
  for (std::size_t r = 0; r < stats.records(); ++r) {
    for (std::size_t b = 0; b < stats.branches; ++b) {
      const auto& est = stats.diagonal[r][b];
      const double z = z_score(est.mean, initial[b].mean, est.std_error);
      ++report.checked;
      if (z > report.max_z) {
        report.max_z = z;
        report.worst_step = stats.steps[r];
        report.worst_branch = b;
      }
    }
  }
  report.verdict = report.max_z < threshold ? Verdict::Pass : Verdict::Fail;
  return report;
}

DecayFitReport decay_fit_test(const EnsembleStats& stats, std::size_t i, std::size_t j, double k,
                              double rate_tolerance, double z_threshold) {
  require_pair(stats, i, j);
  if (!(k >= 0.0 && k <= 1.0)) throw DomainError("k must lie in [0,1]");
  DecayFitReport report;
  report.rate_tolerance = rate_tolerance;
  if (stats.records() == 0) {
    report.note = "no recorded steps";
    return report;
  }
  const double initial = stats.cross_at(0, i, j).mean;
  if (!(initial > 0.0)) throw DomainError("initial cross moment is zero; nothing to fit");
  report.expected_rate = k < 1.0 ? std::log1p(-k * k) : -std::numeric_limits<double>::infinity();
  report.expected_intercept = std::log(initial);

  // Relative variance floor keeps exactly-known points (step 0) finite.
  constexpr double kVarianceFloor = 1e-20;
  std::vector<double> xs, ys, ws;
  for (std::size_t r = 0; r < stats.records(); ++r) {
    const auto& est = stats.cross_at(r, i, j);
    if (!(est.mean > 0.0)) continue;
    const double rel = est.std_error / est.mean;
    xs.push_back(static_cast<double>(stats.steps[r]));
    ys.push_back(std::log(est.mean));
    ws.push_back(1.0 / std::max(rel * rel, kVarianceFloor));
  }
  report.points = xs.size();
  if (xs.size() < 2) {
    report.note = "fewer than two positive points";
    return report;
  }

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    sw += ws[p];
    swx += ws[p] * xs[p];
    swy += ws[p] * ys[p];
  }
  const double xm = swx / sw;
  const double ym = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const double dx = xs[p] - xm;
    sxx += ws[p] * dx * dx;
    sxy += ws[p] * dx * (ys[p] - ym);
  }
  if (!(sxx > 0.0)) {
    report.note = "degenerate step grid";
    return report;
  }
  report.fitted_rate = sxy / sxx;
  report.intercept = ym - report.fitted_rate * xm;
  const double intercept_se = std::sqrt(1.0 / sw + xm * xm / sxx);
  report.intercept_z = z_score(report.intercept, report.expected_intercept, intercept_se);

  const bool rate_ok = std::abs(report.fitted_rate - report.expected_rate) <=
                       rate_tolerance * std::abs(report.expected_rate) + 1e-12;
  const bool intercept_ok = report.intercept_z < z_threshold;
  report.verdict = rate_ok && intercept_ok ? Verdict::Pass : Verdict::Fail;
  if (!rate_ok) report.note = "fitted rate outside tolerance";
  if (!intercept_ok) report.note += report.note.empty() ? "intercept off" : "; intercept off";
  return report;
}

ComparisonReport compare_ensembles(const EnsembleStats& a, const EnsembleStats& b, double threshold) {
  if (a.branches != b.branches || a.steps != b.steps) {
    throw DimensionError("ensembles differ in branch count or recorded steps");
  }
  ComparisonReport report;
  report.threshold = threshold;
  if (a.records() == 0) return report;
  auto add = [&](std::uint64_t step, std::string name, const MomentEstimate& x, const MomentEstimate& y) {
    const double se = std::hypot(x.std_error, y.std_error);
    const double z = z_score(x.mean, y.mean, se);
    report.max_z = std::max(report.max_z, z);
    report.max_abs_diff = std::max(report.max_abs_diff, std::abs(x.mean - y.mean));
    report.entries.push_back({step, std::move(name), x.mean, y.mean, z});
  };
  for (std::size_t r = 0; r < a.records(); ++r) {
    for (std::size_t i = 0; i < a.branches; ++i) {
      add(a.steps[r], "P" + std::to_string(i), a.diagonal[r][i], b.diagonal[r][i]);
    }
    for (std::size_t i = 0; i < a.branches; ++i) {
      for (std::size_t j = i + 1; j < a.branches; ++j) {
        add(a.steps[r], "P" + std::to_string(i) + "P" + std::to_string(j), a.cross_at(r, i, j),
            b.cross_at(r, i, j));
      }
    }
  }
  report.verdict = report.max_z < threshold ? Verdict::Pass : Verdict::Fail;
  return report;
}

BornReport born_statistics_test(const EnsembleStats& stats, std::size_t branch, double expected,
                                double threshold) {
  if (branch >= stats.branches) throw DimensionError("branch index out of range");
  BornReport report;
  report.expected = expected;
  report.threshold = threshold;
  report.trajectories = stats.trajectories;
  report.absorbed = stats.absorbed.empty() ? 0 : stats.absorbed[branch];
  if (stats.trajectories < 2) return report;
  const double n = static_cast<double>(stats.trajectories);
  report.fraction = static_cast<double>(report.absorbed) / n;
  const double se = std::sqrt(expected * (1.0 - expected) / n);
  report.z = z_score(report.fraction, expected, se);
  report.verdict = report.z < threshold ? Verdict::Pass : Verdict::Fail;
  return report;
}

}  // namespace ecollapse
