#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adaprod/types.hpp"

namespace adaprod {

/// Per-point instantaneous regret r_i = (<p, loss> - loss_i) * awake_i.
/// Entries lie in [-1, 1] and satisfy sum_i p_i r_i = 0.
std::vector<double> instantaneous_regret(const ProbabilityVector& p,
                                         const LossVector& loss,
                                         const AwakeMask& awake);

/// Batch variant against scaled inclusion probabilities rho with
/// sum(rho) = b: r_i = (<rho, loss>/b - loss_i) * awake_i.
/// For b = 1 this reduces exactly to instantaneous_regret.
std::vector<double> batch_instantaneous_regret(std::span<const double> rho,
                                               const LossVector& loss, int b,
                                               const AwakeMask& awake);

/// One recorded round: the mixture loss, the regret restricted to awake
/// points, and the comparator slots charged for the dynamic column.
struct LedgerRound {
  int round = 0;
  double mixture = 0.0;
  std::vector<int> awake;       // indices with awake bit set
  std::vector<double> regret;   // aligned with `awake`
  std::vector<int> comparator;  // dynamic comparator slots for this round
  int labeled_count = 0;
  double prediction_gap_sq = 0.0;  // ||r - rhat||_inf^2 for this round
};

/// Append-only regret accounting for one run. Rounds are stored sparsely
/// (awake entries only); cumulative figures are exact prefix sums of what
/// was recorded.
class RegretLedger {
 public:
  explicit RegretLedger(int n);

  void record(LedgerRound round);

  int rounds() const { return static_cast<int>(rows_.size()); }
  const LedgerRound& at(int t) const;  // t is 1-based

  /// Cumulative regret against one comparator index per round. A
  /// comparator asleep at its round contributes zero.
  double cumulative_against(std::span<const int> comparator_per_round) const;

  /// Batch form: sums the per-round regret over each round's slot set.
  double cumulative_against_sets(
      const std::vector<std::vector<int>>& slots_per_round) const;

  /// Running cumulative regret of each fixed point (zero while asleep).
  const std::vector<double>& per_point_cumulative() const { return cum_; }

  /// Best fixed single comparator so far.
  double best_fixed() const;
  /// Best fixed comparator set of size b so far (sum of the top-b
  /// per-point cumulatives).
  double best_fixed_set(int b) const;

  /// Cumulative regret of the recorded dynamic comparator slots.
  double dynamic_cumulative() const { return dynamic_cum_; }

  /// Sum over rounds of ||r - rhat||_inf^2, as recorded.
  double prediction_gap_sum() const { return gap_sum_; }

 private:
  int n_;
  std::vector<LedgerRound> rows_;
  std::vector<double> cum_;
  double dynamic_cum_ = 0.0;
  double gap_sum_ = 0.0;
};

}  // namespace adaprod
