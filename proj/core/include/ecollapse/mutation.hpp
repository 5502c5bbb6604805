#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "ecollapse/distribution.hpp"
#include "ecollapse/dynamics.hpp"

// Deliberately wrong step rules. The verification battery must reject them;
// they exist only to show that its tests have teeth.
namespace ecollapse::mutation {

/// Collapses only when branch 0 is sampled; other draws leave the state
/// unchanged. Drifts E[P_0] upward.
struct BiasedStep {
  void operator()(std::span<double> probs, double k, std::size_t chosen) const noexcept {
    if (chosen == 0) tiny_collapse_step_inplace(probs, k, chosen);
  }
};

/// Non-chosen branches grow by (1 + k) instead of shrinking, followed by a
/// renormalization. Freezes the symmetric two-level state, so the cross moment
/// stops decaying.
struct FlippedSignStep {
  void operator()(std::span<double> probs, double k, std::size_t chosen) const noexcept {
    const double boosted = probs[chosen] + k * (1.0 - probs[chosen]);
    for (double& p : probs) p *= 1.0 + k;
    probs[chosen] = boosted;
    double sum = 0.0;
    for (double p : probs) sum += p;
    for (double& p : probs) p /= sum;
    renormalize(probs);
  }
};

}  // namespace ecollapse::mutation
