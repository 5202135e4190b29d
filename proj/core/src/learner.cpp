#include "adaprod/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace adaprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFixedPointTol = 1e-10;
constexpr int kMaxBisection = 60;

int series_length(double max_rate) {
  // Truncation error of sum_k (eta z)^k / k! after K terms, |z| <= 1,
  // relative to the smallest attainable value e^{-eta}.
  double target = 1e-14;
  double envelope = std::exp(2.0 * std::max(max_rate, 0.0));
  double term = 1.0;  // max_rate^K / K!
  for (int k = 1; k <= 64; ++k) {
    term *= max_rate / static_cast<double>(k);
    if (term * envelope <= target) return std::max(k, 8);
  }
  return 64;
}

void check_rhat(std::span<const double> rhat, int n) {
  if (static_cast<int>(rhat.size()) != n)
    throw StructuralError("prediction vector length does not match pool");
  for (double v : rhat)
    if (!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12))
      throw ContractError("prediction entry outside [-1, 1]");
}

}  // namespace

void AdaProdLearner::PointTable::clear() {
  birth.clear();
  birth.shrink_to_fit();
  rate.clear();
  rate.shrink_to_fit();
  log_w.clear();
  log_w.shrink_to_fit();
  sq_err.clear();
  sq_err.shrink_to_fit();
}

AdaProdLearner::AdaProdLearner(int n, Schedule schedule,
                               std::optional<double> rate_numerator_sq)
    : n_(n),
      schedule_(schedule),
      numerator_sq_(rate_numerator_sq.value_or(
          2.0 * std::log(std::max(n, 1)))),
      init_rate_(std::sqrt(numerator_sq_ / 2.0)),
      awake_(n) {
  if (n < 1) throw StructuralError("pool size must be at least 1");
  if (numerator_sq_ < 0.0)
    throw StructuralError("rate numerator must be non-negative");
  table_.resize(static_cast<size_t>(n));
  for (auto& pt : table_) {
    pt.birth.push_back(1);
    pt.rate.push_back(init_rate_);
    pt.log_w.push_back(0.0);
    pt.sq_err.push_back(0.0);
  }
  terms_ = series_length(init_rate_);
  inv_factorial_.resize(static_cast<size_t>(terms_));
  double f = 1.0;
  for (int k = 0; k < terms_; ++k) {
    inv_factorial_[static_cast<size_t>(k)] = 1.0 / f;
    f *= static_cast<double>(k + 1);
  }
  coeff_.assign(static_cast<size_t>(n_) * static_cast<size_t>(terms_), 0.0);
  rebuild_series();
}

std::size_t AdaProdLearner::expert_count() const {
  std::size_t total = 0;
  for (const auto& pt : table_) total += pt.birth.size();
  return total;
}

void AdaProdLearner::rebuild_series() {
  shift_ = 0.0;
  for (int i = 0; i < n_; ++i)
    for (double lw : table_[static_cast<size_t>(i)].log_w)
      shift_ = std::max(shift_, lw);
  std::fill(coeff_.begin(), coeff_.end(), 0.0);
  for (int i = 0; i < n_; ++i) {
    const PointTable& pt = table_[static_cast<size_t>(i)];
    double* row = coeff_.data() + static_cast<size_t>(i) * terms_;
    const size_t m = pt.rate.size();
    if (m == 0) continue;
    scratch_.resize(m);
    double* powered = scratch_.data();
    const double* log_w = pt.log_w.data();
    const double* rate = pt.rate.data();
    const double shift = shift_;
#pragma omp simd
    for (size_t s = 0; s < m; ++s)
      powered[s] = rate[s] * std::exp(log_w[s] - shift);
    for (int k = 0; k < terms_; ++k) {
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (size_t s = 0; s < m; ++s) {
        acc += powered[s];
        powered[s] *= rate[s];
      }
      row[k] = acc * inv_factorial_[static_cast<size_t>(k)];
    }
  }
}

double AdaProdLearner::series_eval(int point, double z) const {
  const double* row = coeff_.data() + static_cast<size_t>(point) * terms_;
  double acc = row[terms_ - 1];
  for (int k = terms_ - 2; k >= 0; --k) acc = acc * z + row[k];
  return acc;
}

ProbabilityVector AdaProdLearner::distribution(
    std::span<const double> rhat) const {
  check_rhat(rhat, n_);
  if (awake_.awake_count() == 0)
    throw ContractError("all points are asleep");
  std::vector<double> weights(static_cast<size_t>(n_), 0.0);
  if (awake_.awake_count() == 1) {
    for (int i = 0; i < n_; ++i)
      if (awake_.awake(i)) weights[static_cast<size_t>(i)] = 1.0;
    return ProbabilityVector::normalized(std::move(weights), awake_);
  }
  for (int i = 0; i < n_; ++i)
    if (awake_.awake(i))
      weights[static_cast<size_t>(i)] = series_eval(i, rhat[static_cast<size_t>(i)]);
  return ProbabilityVector::normalized(std::move(weights), awake_);
}

double AdaProdLearner::mixture_for_alpha(std::span<const double> lhat,
                                         double alpha) const {
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (!awake_.awake(i)) continue;
    double li = lhat[static_cast<size_t>(i)];
    double w = series_eval(i, alpha - li);
    num += li * w;
    den += w;
  }
  return num / den;
}

Prediction AdaProdLearner::predict(const LossVector& lhat) const {
  if (lhat.size() != n_)
    throw StructuralError("loss prediction length does not match pool");
  if (awake_.awake_count() == 0)
    throw ContractError("all points are asleep");

  Prediction out;
  out.rhat.assign(static_cast<size_t>(n_), 0.0);

  auto finish = [&](double alpha, double residual, int iters) {
    out.alpha = alpha;
    out.residual = residual;
    out.iterations = iters;
    for (int i = 0; i < n_; ++i)
      if (awake_.awake(i))
        out.rhat[static_cast<size_t>(i)] = alpha - lhat[i];
    return out;
  };

  // A constant prediction over the awake set is its own fixed point.
  double first = -1.0;
  bool constant = true;
  for (int i = 0; i < n_ && constant; ++i) {
    if (!awake_.awake(i)) continue;
    if (first < 0.0)
      first = lhat[i];
    else if (lhat[i] != first)
      constant = false;
  }
  if (constant || awake_.awake_count() == 1) return finish(first, 0.0, 0);

  double lo = 0.0, hi = 1.0;
  double mid = 0.5, g = 0.0;
  for (int iter = 1; iter <= kMaxBisection; ++iter) {
    mid = 0.5 * (lo + hi);
    g = mid - mixture_for_alpha(lhat.values(), mid);
    if (std::abs(g) <= kFixedPointTol) return finish(mid, std::abs(g), iter);
    if (g > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  mid = 0.5 * (lo + hi);
  double residual = std::abs(mid - mixture_for_alpha(lhat.values(), mid));
  if (residual <= kFixedPointTol)
    return finish(mid, residual, kMaxBisection);
  throw NumericalError(
      "optimistic fixed point did not converge, residual " +
          std::to_string(residual),
      residual);
}

double AdaProdLearner::schedule_rate(double rate_old, double sq_err,
                                     double rhat_next) const {
  if (schedule_ == Schedule::OptimisticAmlProd) {
    double var_cap = std::sqrt(numerator_sq_ / (1.0 + sq_err));
    return std::min(rate_old, std::min(0.25, var_cap));
  }
  double denom = 1.0 + rhat_next;
  double opt_cap = denom > 0.0 ? 2.0 / (3.0 * denom) : kInf;
  double var_cap = sq_err > 0.0 ? std::sqrt(numerator_sq_ / sq_err) : kInf;
  return std::min(rate_old, std::min(opt_cap, var_cap));
}

double AdaProdLearner::birth_rate(double rhat_next) const {
  if (schedule_ == Schedule::OptimisticAmlProd)
    return std::min(init_rate_,
                    std::min(0.25, std::sqrt(numerator_sq_)));
  double denom = 1.0 + rhat_next;
  double opt_cap = denom > 0.0 ? 2.0 / (3.0 * denom) : kInf;
  // Experts born at round >= 3 have sat through at least one idle update
  // whose optimistic cap degenerates to 2/3.
  double idle_cap = t_ >= 2 ? 2.0 / 3.0 : kInf;
  return std::min(std::min(init_rate_, idle_cap), opt_cap);
}

RoundOutcome AdaProdLearner::observe(const LossVector& loss,
                                     const ProbabilityVector& played,
                                     std::span<const double> rhat_used,
                                     std::span<const double> rhat_next) {
  if (loss.size() != n_ || played.size() != n_)
    throw StructuralError("observe: length mismatch");
  check_rhat(rhat_used, n_);
  check_rhat(rhat_next, n_);
  for (int i = 0; i < n_; ++i)
    if (!awake_.awake(i) && played[i] != 0.0)
      throw ContractError("played distribution has mass on asleep point");

  const double mixture = dot(played.values(), loss.values());

  RoundOutcome outcome;
  outcome.round = t_;
  outcome.mixture = mixture;
  outcome.regret.assign(static_cast<size_t>(n_), 0.0);

  double zero_sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (!awake_.awake(i)) continue;
    double r = mixture - loss[i];
    outcome.regret[static_cast<size_t>(i)] = r;
    zero_sum += played[i] * r;
  }
  if (std::abs(zero_sum) > 1e-12) ++counters_.zero_sum;

  for (int i = 0; i < n_; ++i) {
    if (!awake_.awake(i)) continue;
    PointTable& pt = table_[static_cast<size_t>(i)];
    const double r = outcome.regret[static_cast<size_t>(i)];
    const double err = rhat_used[static_cast<size_t>(i)] - r;
    const double err_sq = err * err;
    const double rn = rhat_next[static_cast<size_t>(i)];
    const size_t m = pt.rate.size();
    for (size_t s = 0; s < m; ++s) {
      pt.sq_err[s] += err_sq;
      double rate_old = pt.rate[s];
      double rate_new = schedule_rate(rate_old, pt.sq_err[s], rn);
      if (rate_new > rate_old + 1e-15) ++counters_.rate_monotone;
      if (schedule_ == Schedule::AdaProdPlus &&
          rate_new * (1.0 + rn) > 2.0 / 3.0 + 1e-12)
        ++counters_.prod_domain;
      if (rate_old > 0.0) {
        pt.log_w[s] = (rate_new / rate_old) *
                      (pt.log_w[s] + rate_old * r - rate_old * rate_old * err_sq);
      }
      pt.rate[s] = rate_new;
    }
    pt.birth.push_back(t_ + 1);
    pt.rate.push_back(birth_rate(rn));
    pt.log_w.push_back(0.0);
    pt.sq_err.push_back(0.0);
  }

  ++t_;
  rebuild_series();
  return outcome;
}

void AdaProdLearner::mark_labeled(std::span<const int> indices) {
  for (int i : indices) {
    if (i < 0 || i >= n_) throw StructuralError("label index out of range");
    awake_.sleep(i);  // throws if already asleep
    table_[static_cast<size_t>(i)].clear();
    double* row = coeff_.data() + static_cast<size_t>(i) * terms_;
    std::fill(row, row + terms_, 0.0);
  }
  // The shared shift may now overshoot the surviving maximum, which only
  // scales every point the same way; the next observe() retightens it.
}

std::vector<ExpertSnapshot> AdaProdLearner::experts() const {
  std::vector<ExpertSnapshot> out;
  out.reserve(expert_count());
  for (int i = 0; i < n_; ++i) {
    const PointTable& pt = table_[static_cast<size_t>(i)];
    for (size_t s = 0; s < pt.birth.size(); ++s)
      out.push_back({pt.birth[s], i, pt.rate[s], pt.log_w[s], pt.sq_err[s]});
  }
  return out;
}

}  // namespace adaprod
