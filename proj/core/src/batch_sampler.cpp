#include "adaprod/batch_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace adaprod {

namespace {
constexpr double kSnapTol = 1e-12;
}

ProbabilityVector cap_probabilities(const ProbabilityVector& p, int b,
                                    const AwakeMask& awake) {
  if (p.size() != awake.size())
    throw StructuralError("cap: length mismatch");
  if (b < 1) throw ContractError("batch size must be at least 1");
  if (b > awake.awake_count())
    throw ContractError("batch size " + std::to_string(b) +
                        " exceeds awake count " +
                        std::to_string(awake.awake_count()));

  const int n = p.size();
  const double cap = 1.0 / static_cast<double>(b);
  // Feasible up to the postcondition tolerance stays untouched, which
  // also makes a second application the identity.
  if (p.max_entry() <= cap + kSnapTol) return p;

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int c) { return p[a] > p[c]; });

  std::vector<double> suffix(static_cast<size_t>(n) + 1, 0.0);
  for (int j = n - 1; j >= 0; --j)
    suffix[static_cast<size_t>(j)] =
        suffix[static_cast<size_t>(j) + 1] + p[order[static_cast<size_t>(j)]];

  // Smallest k for which capping the top k at 1/b and scaling the tail
  // to the leftover mass keeps every entry at or under the cap.
  int k = 0;
  while (k < n && p[order[static_cast<size_t>(k)]] *
                          static_cast<double>(b - k) >
                      suffix[static_cast<size_t>(k)] + 1e-13)
    ++k;
  if (k >= b)
    throw ContractError("capped simplex infeasible for the given support");
  const double leftover = 1.0 - static_cast<double>(k) * cap;
  const double tail = suffix[static_cast<size_t>(k)];
  if (tail <= 0.0)
    throw ContractError("cap: zero-mass tail cannot absorb leftover mass");

  std::vector<double> q(static_cast<size_t>(n), 0.0);
  const double scale = leftover / tail;
  double tail_actual = 0.0;
  for (int j = 0; j < n; ++j) {
    int idx = order[static_cast<size_t>(j)];
    if (j < k) {
      q[static_cast<size_t>(idx)] = cap;
    } else {
      q[static_cast<size_t>(idx)] = p[idx] * scale;
      tail_actual += q[static_cast<size_t>(idx)];
    }
  }
  // One corrective pass keeps the total within the type's tolerance for
  // any pool size.
  if (tail_actual > 0.0) {
    const double fix = leftover / tail_actual;
    for (int j = k; j < n; ++j) {
      int idx = order[static_cast<size_t>(j)];
      q[static_cast<size_t>(idx)] =
          std::min(q[static_cast<size_t>(idx)] * fix, cap);
    }
  }
  return ProbabilityVector(std::move(q), awake);
}

std::vector<int> dep_round(std::span<const double> scaled, Rng& rng) {
  const int n = static_cast<int>(scaled.size());
  std::vector<double> w(scaled.begin(), scaled.end());
  double total = 0.0;
  for (double v : w) {
    if (v < -kSnapTol || v > 1.0 + kSnapTol)
      throw ContractError("inclusion probability outside [0, 1]");
    total += v;
  }
  const double rounded = std::round(total);
  if (std::abs(total - rounded) > 1e-9)
    throw ContractError("inclusion probabilities sum to " +
                        std::to_string(total) + ", not an integer");
  const int b = static_cast<int>(rounded);

  auto snapped = [&](int i) {
    double& v = w[static_cast<size_t>(i)];
    if (v <= kSnapTol) {
      v = 0.0;
      return true;
    }
    if (v >= 1.0 - kSnapTol) {
      v = 1.0;
      return true;
    }
    return false;
  };

  std::vector<int> frac;
  frac.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    if (!snapped(i)) frac.push_back(i);

  while (frac.size() >= 2) {
    int i = frac[0];
    int j = frac[1];
    double& pi = w[static_cast<size_t>(i)];
    double& pj = w[static_cast<size_t>(j)];
    double alpha = std::min(1.0 - pi, pj);
    double beta = std::min(pi, 1.0 - pj);
    if (rng.uniform01() < beta / (alpha + beta)) {
      pi += alpha;
      pj -= alpha;
    } else {
      pi -= beta;
      pj += beta;
    }
    // Drop whichever of the pair resolved; at least one always does.
    size_t keep = 0;
    if (!snapped(i)) frac[keep++] = i;
    if (!snapped(j)) frac[keep++] = j;
    frac.erase(frac.begin() + keep, frac.begin() + 2);
  }

  if (frac.size() == 1) {
    // An integral total forces the lone leftover to a boundary, give or
    // take transfer round-off.
    double& v = w[static_cast<size_t>(frac[0])];
    if (std::abs(v) < 1e-6)
      v = 0.0;
    else if (std::abs(v - 1.0) < 1e-6)
      v = 1.0;
    else
      throw ContractError("rounding left an unresolved entry at " +
                          std::to_string(v));
  }

  std::vector<int> chosen;
  chosen.reserve(static_cast<size_t>(b));
  for (int i = 0; i < n; ++i)
    if (w[static_cast<size_t>(i)] == 1.0) chosen.push_back(i);
  if (static_cast<int>(chosen.size()) != b)
    throw ContractError("rounding produced " +
                        std::to_string(chosen.size()) + " indices, need " +
                        std::to_string(b));
  return chosen;
}

BatchPlan sample_batch(const ProbabilityVector& p, int b,
                       const AwakeMask& awake, Rng& rng) {
  const double cap = 1.0 / static_cast<double>(b);
  bool active = p.max_entry() > cap + kSnapTol;
  ProbabilityVector capped = cap_probabilities(p, b, awake);
  std::vector<double> scaled(capped.values().begin(), capped.values().end());
  for (double& v : scaled) {
    v *= static_cast<double>(b);
    v = std::min(v, 1.0);
  }
  std::vector<int> chosen = dep_round(scaled, rng);
  return BatchPlan{std::move(capped), std::move(scaled), std::move(chosen),
                   active};
}

}  // namespace adaprod
