#include "adaprod/base_prod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace adaprod {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BaseProd::BaseProd(int experts, std::optional<double> rate_numerator_sq)
    : k_(experts),
      numerator_sq_(rate_numerator_sq.value_or(
          std::log(std::max(experts, 1)))),
      init_rate_(std::sqrt(numerator_sq_ / 2.0)),
      all_awake_(experts) {
  if (experts < 1) throw StructuralError("need at least one expert");
  rate_.assign(static_cast<size_t>(k_), init_rate_);
  log_w_.assign(static_cast<size_t>(k_), 0.0);
  sq_err_.assign(static_cast<size_t>(k_), 0.0);
}

ProbabilityVector BaseProd::distribution(
    std::span<const double> rhat_current) const {
  if (static_cast<int>(rhat_current.size()) != k_)
    throw StructuralError("prediction length does not match expert count");
  if (k_ == 1) return ProbabilityVector::normalized({1.0}, all_awake_);
  double shift = 0.0;
  for (int i = 0; i < k_; ++i)
    shift = std::max(shift, log_w_[static_cast<size_t>(i)] +
                                rate_[static_cast<size_t>(i)] *
                                    rhat_current[static_cast<size_t>(i)]);
  std::vector<double> weights(static_cast<size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    size_t s = static_cast<size_t>(i);
    weights[s] = rate_[s] * std::exp(log_w_[s] + rate_[s] * rhat_current[s] -
                                     shift);
  }
  return ProbabilityVector::normalized(std::move(weights), all_awake_);
}

BaseProd::StepOutcome BaseProd::step(std::span<const double> loss,
                                     std::span<const double> rhat_current,
                                     std::span<const double> rhat_next) {
  if (static_cast<int>(loss.size()) != k_ ||
      static_cast<int>(rhat_next.size()) != k_)
    throw StructuralError("step: length mismatch");
  for (double v : loss)
    if (!(v >= 0.0 && v <= 1.0))
      throw ContractError("loss entry outside [0, 1]");

  ProbabilityVector played = distribution(rhat_current);
  const double mixture = dot(played.values(), loss);

  StepOutcome out{std::move(played), {}, mixture};
  out.regret.resize(static_cast<size_t>(k_));

  double zero_sum = 0.0;
  for (int i = 0; i < k_; ++i) {
    size_t s = static_cast<size_t>(i);
    out.regret[s] = mixture - loss[s];
    zero_sum += out.played[i] * out.regret[s];
  }
  if (std::abs(zero_sum) > 1e-12) ++counters_.zero_sum;

  for (int i = 0; i < k_; ++i) {
    size_t s = static_cast<size_t>(i);
    const double err = rhat_current[s] - out.regret[s];
    sq_err_[s] += err * err;
    const double denom = 1.0 + rhat_next[s];
    const double opt_cap = denom > 0.0 ? 2.0 / (3.0 * denom) : kInf;
    const double var_cap =
        sq_err_[s] > 0.0 ? std::sqrt(numerator_sq_ / sq_err_[s]) : kInf;
    const double rate_new = std::min(rate_[s], std::min(opt_cap, var_cap));
    if (rate_new > rate_[s] + 1e-15) ++counters_.rate_monotone;
    if (rate_new * (1.0 + rhat_next[s]) > 2.0 / 3.0 + 1e-12)
      ++counters_.prod_domain;
    if (rate_[s] > 0.0) {
      log_w_[s] = (rate_new / rate_[s]) *
                  (log_w_[s] + rate_[s] * out.regret[s] -
                   rate_[s] * rate_[s] * err * err);
    }
    rate_[s] = rate_new;
  }
  ++t_;
  return out;
}

double BaseProd::potential_sum() const {
  double shift = *std::max_element(log_w_.begin(), log_w_.end());
  double acc = 0.0;
  for (double lw : log_w_) acc += std::exp(lw - shift);
  return std::exp(shift) * acc;
}

SleepingReduction::SleepingReduction(int n, int horizon,
                                     std::optional<double> rate_numerator_sq)
    : n_(n),
      horizon_(horizon),
      awake_(n),
      base_(n * horizon,
            rate_numerator_sq.value_or(2.0 * std::log(std::max(n, 1)))) {
  if (horizon < 1) throw StructuralError("horizon must be at least 1");
}

std::vector<double> SleepingReduction::expand(std::span<const double> per_point,
                                              int birth_limit) const {
  // Expert (s, i) sits at index (s - 1) * n + i.
  std::vector<double> full(static_cast<size_t>(n_) * horizon_, 0.0);
  for (int s = 1; s <= std::min(birth_limit, horizon_); ++s)
    for (int i = 0; i < n_; ++i)
      full[static_cast<size_t>(s - 1) * n_ + i] =
          per_point[static_cast<size_t>(i)];
  return full;
}

ProbabilityVector SleepingReduction::distribution(
    std::span<const double> rhat) const {
  if (static_cast<int>(rhat.size()) != n_)
    throw StructuralError("prediction length does not match pool");
  if (awake_.awake_count() == 0)
    throw ContractError("all points are asleep");
  std::vector<double> full_rhat = expand(rhat, t_);
  ProbabilityVector bar = base_.distribution(full_rhat);
  std::vector<double> mass(static_cast<size_t>(n_), 0.0);
  for (int s = 1; s <= t_; ++s)
    for (int i = 0; i < n_; ++i)
      if (awake_.awake(i))
        mass[static_cast<size_t>(i)] += bar[(s - 1) * n_ + i];
  return ProbabilityVector::normalized(std::move(mass), awake_);
}

void SleepingReduction::observe(const LossVector& loss,
                                std::span<const double> rhat_used,
                                std::span<const double> rhat_next) {
  if (loss.size() != n_) throw StructuralError("loss length mismatch");
  if (t_ > horizon_) throw ContractError("reduction horizon exhausted");
  ProbabilityVector pool = distribution(rhat_used);
  const double mixture = dot(pool.values(), loss.values());

  std::vector<double> bar_loss(static_cast<size_t>(n_) * horizon_, mixture);
  for (int s = 1; s <= t_; ++s)
    for (int i = 0; i < n_; ++i)
      if (awake_.awake(i))
        bar_loss[static_cast<size_t>(s - 1) * n_ + i] = loss[i];

  std::vector<double> bar_rhat_used = expand(rhat_used, t_);
  std::vector<double> bar_rhat_next = expand(rhat_next, t_ + 1);
  base_.step(bar_loss, bar_rhat_used, bar_rhat_next);
  ++t_;
}

void SleepingReduction::mark_labeled(std::span<const int> indices) {
  for (int i : indices) {
    if (i < 0 || i >= n_) throw StructuralError("label index out of range");
    awake_.sleep(i);
  }
}

}  // namespace adaprod
