#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adaprod/types.hpp"

namespace adaprod {

struct ExpertSnapshot {
  int birth = 0;  // first round the expert participates in
  int point = 0;
  double rate = 0.0;
  double log_weight = 0.0;
  double sq_error = 0.0;  // accumulated squared prediction error
};

struct Prediction {
  double alpha = 0.0;
  std::vector<double> rhat;  // (alpha - lhat_i) on awake points, 0 asleep
  double residual = 0.0;
  int iterations = 0;
};

struct RoundOutcome {
  int round = 0;
  double mixture = 0.0;
  std::vector<double> regret;  // full length, zero on asleep points
};

/// Counters for the invariants checked on every update. They stay zero on
/// correct runs; tests assert on them.
struct InvariantCounters {
  std::uint64_t zero_sum = 0;       // |sum_i p_i r_i| exceeded 1e-12
  std::uint64_t rate_monotone = 0;  // a stored rate increased
  std::uint64_t prod_domain = 0;    // rate * (1 + rhat_next) left (0, 2/3]
  std::uint64_t total() const {
    return zero_sum + rate_monotone + prod_domain;
  }
};

/// Sleeping-experts learner with optimistic predictions. One expert is
/// kept per (birth round, point) pair for awake points only, so the table
/// holds at most sum_t n_t records after t rounds. Weights live in log
/// space; the distribution is evaluated through per-point power-series
/// coefficients so that the fixed-point search below costs O(n) per probe
/// instead of a pass over the whole table.
///
/// The same machinery runs two learning-rate schedules: the default one
/// whose optimistic cap is 2/(3(1 + rhat)) with variance term
/// sqrt(numerator_sq / C), and the conservative predecessor capped at 1/4
/// with a +1 dampening in the denominator.
class AdaProdLearner {
 public:
  enum class Schedule { AdaProdPlus, OptimisticAmlProd };

  explicit AdaProdLearner(int n, Schedule schedule = Schedule::AdaProdPlus,
                          std::optional<double> rate_numerator_sq = {});

  int pool_size() const { return n_; }
  int round() const { return t_; }
  const AwakeMask& awake() const { return awake_; }
  Schedule schedule() const { return schedule_; }
  double rate_numerator_sq() const { return numerator_sq_; }
  double initial_rate() const { return init_rate_; }
  std::size_t expert_count() const;

  /// The played distribution for the given optimistic regret prediction,
  /// |rhat_i| <= 1. Zero mass on asleep points.
  ProbabilityVector distribution(std::span<const double> rhat) const;

  /// Solves alpha in [0, 1] with alpha = <p(rhat(alpha)), lhat> by
  /// bisection (tolerance 1e-10 on the residual, at most 60 iterations),
  /// where rhat(alpha)_i = (alpha - lhat_i) on awake points. Throws
  /// NumericalError with the residual if the tolerance is not met.
  Prediction predict(const LossVector& lhat) const;

  /// Absorbs one revealed loss vector: accumulates squared prediction
  /// errors, tightens every live rate, rewrites weights in log space,
  /// spawns the next round's expert per awake point and advances the
  /// round counter.
  RoundOutcome observe(const LossVector& loss, const ProbabilityVector& played,
                       std::span<const double> rhat_used,
                       std::span<const double> rhat_next);

  /// Removes the given awake points and all their expert records.
  void mark_labeled(std::span<const int> indices);

  std::vector<ExpertSnapshot> experts() const;
  const InvariantCounters& invariants() const { return counters_; }

 private:
  struct PointTable {
    std::vector<int> birth;
    std::vector<double> rate;
    std::vector<double> log_w;
    std::vector<double> sq_err;
    void clear();
  };

  double series_eval(int point, double z) const;
  double mixture_for_alpha(std::span<const double> lhat, double alpha) const;
  void rebuild_series();
  double schedule_rate(double rate_old, double sq_err, double rhat_next) const;
  double birth_rate(double rhat_next) const;

  int n_;
  int t_ = 1;
  Schedule schedule_;
  double numerator_sq_;
  double init_rate_;
  AwakeMask awake_;
  std::vector<PointTable> table_;

  int terms_;                  // series length per point
  double shift_ = 0.0;         // log-weight shift shared by all points
  std::vector<double> coeff_;  // n_ x terms_, row-major
  std::vector<double> inv_factorial_;
  mutable std::vector<double> scratch_;

  mutable InvariantCounters counters_;
};

}  // namespace adaprod
