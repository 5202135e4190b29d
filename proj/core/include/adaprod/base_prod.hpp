#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adaprod/learner.hpp"
#include "adaprod/types.hpp"

namespace adaprod {

/// Fixed-table prod-style learner over K always-awake experts. Initial
/// rate sqrt(numerator_sq / 2) with the variance term sqrt(numerator_sq /
/// C); the numerator defaults to log K. Weights are stored in log space.
class BaseProd {
 public:
  struct StepOutcome {
    ProbabilityVector played;
    std::vector<double> regret;
    double mixture = 0.0;
  };

  explicit BaseProd(int experts,
                    std::optional<double> rate_numerator_sq = {});

  int experts() const { return k_; }
  int round() const { return t_; }
  double initial_rate() const { return init_rate_; }

  /// p_i proportional to rate_i * w_i * exp(rate_i * rhat_i).
  ProbabilityVector distribution(std::span<const double> rhat_current) const;

  /// Plays the distribution for rhat_current, absorbs the loss, then
  /// tightens rates with rhat_next and rewrites the weights.
  StepOutcome step(std::span<const double> loss,
                   std::span<const double> rhat_current,
                   std::span<const double> rhat_next);

  /// W_t = sum_i w_i, evaluated from log weights with a max shift.
  double potential_sum() const;

  std::span<const double> rates() const { return rate_; }
  std::span<const double> log_weights() const { return log_w_; }
  std::span<const double> sq_errors() const { return sq_err_; }
  const InvariantCounters& invariants() const { return counters_; }

 private:
  int k_;
  int t_ = 1;
  double numerator_sq_;
  double init_rate_;
  AwakeMask all_awake_;
  std::vector<double> rate_, log_w_, sq_err_;
  InvariantCounters counters_;
};

/// The same updates run over a fully materialized table of n*T experts
/// indexed by (birth round, point). An expert participates once its birth
/// round has arrived and while its point is unlabeled; the others receive
/// the mixture loss and a zero prediction, which leaves their weights at
/// one. Exists as a brute-force guard for the incremental learner, which
/// creates experts lazily.
class SleepingReduction {
 public:
  SleepingReduction(int n, int horizon,
                    std::optional<double> rate_numerator_sq = {});

  int pool_size() const { return n_; }
  int round() const { return t_; }
  const AwakeMask& awake() const { return awake_; }

  /// Pool-level distribution: awake experts' masses summed per point and
  /// renormalized.
  ProbabilityVector distribution(std::span<const double> rhat) const;

  void observe(const LossVector& loss, std::span<const double> rhat_used,
               std::span<const double> rhat_next);

  void mark_labeled(std::span<const int> indices);

  const BaseProd& base() const { return base_; }

 private:
  std::vector<double> expand(std::span<const double> per_point,
                             int birth_limit) const;

  int n_;
  int horizon_;
  int t_ = 1;
  AwakeMask awake_;
  BaseProd base_;
};

}  // namespace adaprod
