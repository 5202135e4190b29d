#pragma once

#include <span>
#include <vector>

#include "adaprod/rng.hpp"
#include "adaprod/types.hpp"

namespace adaprod {

/// Everything needed to audit one batch draw: the capped distribution,
/// its scaling to inclusion probabilities summing to b, the chosen
/// indices, and whether the cap actually bound.
struct BatchPlan {
  ProbabilityVector capped;
  std::vector<double> scaled;
  std::vector<int> chosen;  // ascending, exactly b entries
  bool cap_was_active = false;
};

/// Projects p onto {q : sum q = 1, max q <= 1/b}. The largest entries are
/// pinned at 1/b and the tail keeps its relative proportions; ties in p
/// stay ties, and an already feasible p comes back unchanged. O(n log n).
ProbabilityVector cap_probabilities(const ProbabilityVector& p, int b,
                                    const AwakeMask& awake);

/// Rounds fractional inclusion probabilities (entries in [0, 1], integral
/// sum b within 1e-9) to exactly b indices whose marginal inclusion
/// probability equals the input. Pairwise transfers over the first two
/// fractional entries, each resolving at least one of them, so O(n)
/// resolution steps.
std::vector<int> dep_round(std::span<const double> scaled, Rng& rng);

/// cap -> scale by b -> dep_round.
BatchPlan sample_batch(const ProbabilityVector& p, int b,
                       const AwakeMask& awake, Rng& rng);

}  // namespace adaprod
