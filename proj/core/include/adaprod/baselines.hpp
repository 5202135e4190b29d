#pragma once

#include <span>
#include <vector>

#include "adaprod/rng.hpp"
#include "adaprod/types.hpp"

namespace adaprod {

/// Top-b awake points by informativeness, ties broken toward the lowest
/// index. Deterministic.
std::vector<int> greedy_select(std::span<const double> informativeness,
                               const AwakeMask& awake, int b);

/// Uniformly random b-subset of the awake points, without replacement.
std::vector<int> uniform_select(const AwakeMask& awake, int b, Rng& rng);

/// Interval accumulators for one birth epoch: the regret gathered since
/// the epoch opened and the evidence term its weight is driven by.
struct IntervalAccumulator {
  double regret = 0.0;
  double evidence = 0.0;  // sum of |r|, or of r^2 for the rate-integral
};

/// Time-varying parameter-free hedging over sleeping experts. One
/// accumulator pair (interval regret R, interval absolute regret C) is
/// kept per point and birth epoch; the played distribution mixes the
/// potential-derived weights under a prior over epochs.
///
///   phi(R, C) = exp(max(R, 0)^2 / (3C)), phi(., 0) = 1
///   w(R, C)   = (phi(R+1, C+1) - phi(R-1, C+1)) / 2
///   p_i  ~    I_i * sum_tau prior(tau) * w(R_[tau..t-1],i, C_[tau..t-1],i)
class AdaNormalHedge {
 public:
  enum class Prior { InverseSquare, Uniform };

  explicit AdaNormalHedge(int n, Prior prior = Prior::InverseSquare);

  /// phi(R, C) above, with phi(., 0) = 1.
  static double potential(double interval_regret, double interval_abs);
  /// log of w(R, C) above; -inf when the weight is zero.
  static double log_weight(double interval_regret, double interval_abs);

  int pool_size() const { return n_; }
  int round() const { return t_; }
  const AwakeMask& awake() const { return awake_; }

  ProbabilityVector distribution() const;
  /// Absorbs one loss vector using this learner's own distribution.
  void observe(const LossVector& loss);
  void mark_labeled(std::span<const int> indices);

 private:
  int n_;
  int t_ = 1;
  Prior prior_;
  AwakeMask awake_;
  std::vector<std::vector<IntervalAccumulator>> epochs_;
  std::vector<double> log_prior_;
};

/// Same time-varying construction with the evidence weight taken as the
/// closed-form integral over learning rates in [0, 1/2] of
/// exp(eta R - eta^2 V), V the interval sum of squared regrets.
class Squint {
 public:
  using Prior = AdaNormalHedge::Prior;

  explicit Squint(int n, Prior prior = Prior::InverseSquare);

  static double log_weight(double interval_regret, double interval_sq);

  int pool_size() const { return n_; }
  int round() const { return t_; }
  const AwakeMask& awake() const { return awake_; }

  ProbabilityVector distribution() const;
  void observe(const LossVector& loss);
  void mark_labeled(std::span<const int> indices);

 private:
  int n_;
  int t_ = 1;
  Prior prior_;
  AwakeMask awake_;
  std::vector<std::vector<IntervalAccumulator>> epochs_;
  std::vector<double> log_prior_;
};

}  // namespace adaprod
