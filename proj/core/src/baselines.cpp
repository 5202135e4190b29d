#include "adaprod/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "adaprod/numeric.hpp"

namespace adaprod {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_batch(const AwakeMask& awake, int b) {
  if (b < 1) throw ContractError("batch size must be at least 1");
  if (b > awake.awake_count())
    throw ContractError("batch size " + std::to_string(b) +
                        " exceeds awake count " +
                        std::to_string(awake.awake_count()));
}

// Shared mass computation for the two time-varying learners.
template <typename LogWeight>
std::vector<double> epoch_mass(
    int n, const AwakeMask& awake,
    const std::vector<std::vector<IntervalAccumulator>>& epochs,
    const std::vector<double>& log_prior, LogWeight&& log_weight) {
  double shift = kNegInf;
  std::vector<std::vector<double>> terms(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!awake.awake(i)) continue;
    const auto& eps = epochs[static_cast<size_t>(i)];
    auto& ts = terms[static_cast<size_t>(i)];
    ts.resize(eps.size());
    for (size_t tau = 0; tau < eps.size(); ++tau) {
      ts[tau] = log_prior[tau] + log_weight(eps[tau].regret, eps[tau].evidence);
      shift = std::max(shift, ts[tau]);
    }
  }
  std::vector<double> mass(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    if (!awake.awake(i)) continue;
    double acc = 0.0;
    for (double t : terms[static_cast<size_t>(i)])
      if (t > kNegInf) acc += std::exp(t - shift);
    mass[static_cast<size_t>(i)] = acc;
  }
  return mass;
}

template <typename Learner>
void epoch_observe(Learner& self, int n, int& t, const AwakeMask& awake,
                   std::vector<std::vector<IntervalAccumulator>>& epochs,
                   std::vector<double>& log_prior,
                   const LossVector& loss, bool squared_evidence,
                   AdaNormalHedge::Prior prior) {
  if (loss.size() != n) throw StructuralError("loss length mismatch");
  ProbabilityVector p = self.distribution();
  const double mixture = dot(p.values(), loss.values());
  for (int i = 0; i < n; ++i) {
    if (!awake.awake(i)) continue;
    const double r = mixture - loss[i];
    for (auto& ep : epochs[static_cast<size_t>(i)]) {
      ep.regret += r;
      ep.evidence += squared_evidence ? r * r : std::abs(r);
    }
    epochs[static_cast<size_t>(i)].push_back({});
  }
  ++t;
  log_prior.push_back(prior == AdaNormalHedge::Prior::InverseSquare
                          ? -2.0 * std::log(static_cast<double>(t))
                          : 0.0);
}

}  // namespace

std::vector<int> greedy_select(std::span<const double> informativeness,
                               const AwakeMask& awake, int b) {
  if (static_cast<int>(informativeness.size()) != awake.size())
    throw StructuralError("informativeness length does not match pool");
  check_batch(awake, b);
  std::vector<int> candidates = awake.awake_indices();
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int c) {
    return informativeness[static_cast<size_t>(a)] >
           informativeness[static_cast<size_t>(c)];
  });
  candidates.resize(static_cast<size_t>(b));
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

std::vector<int> uniform_select(const AwakeMask& awake, int b, Rng& rng) {
  check_batch(awake, b);
  std::vector<int> pool = awake.awake_indices();
  // Partial Fisher-Yates: the first b slots become the sample.
  for (int k = 0; k < b; ++k) {
    size_t j = static_cast<size_t>(k) +
               rng.below(pool.size() - static_cast<size_t>(k));
    std::swap(pool[static_cast<size_t>(k)], pool[j]);
  }
  pool.resize(static_cast<size_t>(b));
  std::sort(pool.begin(), pool.end());
  return pool;
}

AdaNormalHedge::AdaNormalHedge(int n, Prior prior)
    : n_(n), prior_(prior), awake_(n) {
  epochs_.resize(static_cast<size_t>(n));
  for (auto& e : epochs_) e.push_back({});
  log_prior_.push_back(0.0);  // tau = 1
}

double AdaNormalHedge::potential(double interval_regret,
                                 double interval_abs) {
  if (interval_abs <= 0.0) return 1.0;
  const double up = std::max(interval_regret, 0.0);
  return std::exp(up * up / (3.0 * interval_abs));
}

double AdaNormalHedge::log_weight(double interval_regret,
                                  double interval_abs) {
  const double denom = 3.0 * (interval_abs + 1.0);
  const double up = std::max(interval_regret + 1.0, 0.0);
  const double down = std::max(interval_regret - 1.0, 0.0);
  const double a = up * up / denom;
  const double b = down * down / denom;
  if (a <= b) return kNegInf;  // weight is exactly zero
  return b + std::log(std::expm1(a - b)) - std::log(2.0);
}

ProbabilityVector AdaNormalHedge::distribution() const {
  if (awake_.awake_count() == 0)
    throw ContractError("all points are asleep");
  return ProbabilityVector::normalized(
      epoch_mass(n_, awake_, epochs_, log_prior_,
                 [](double r, double c) { return log_weight(r, c); }),
      awake_);
}

void AdaNormalHedge::observe(const LossVector& loss) {
  epoch_observe(*this, n_, t_, awake_, epochs_, log_prior_, loss,
                /*squared_evidence=*/false, prior_);
}

void AdaNormalHedge::mark_labeled(std::span<const int> indices) {
  for (int i : indices) {
    if (i < 0 || i >= n_) throw StructuralError("label index out of range");
    awake_.sleep(i);
    epochs_[static_cast<size_t>(i)].clear();
    epochs_[static_cast<size_t>(i)].shrink_to_fit();
  }
}

Squint::Squint(int n, Prior prior) : n_(n), prior_(prior), awake_(n) {
  epochs_.resize(static_cast<size_t>(n));
  for (auto& e : epochs_) e.push_back({});
  log_prior_.push_back(0.0);
}

double Squint::log_weight(double interval_regret, double interval_sq) {
  return log_rate_integral(interval_regret, interval_sq);
}

ProbabilityVector Squint::distribution() const {
  if (awake_.awake_count() == 0)
    throw ContractError("all points are asleep");
  return ProbabilityVector::normalized(
      epoch_mass(n_, awake_, epochs_, log_prior_,
                 [](double r, double v) { return log_weight(r, v); }),
      awake_);
}

void Squint::observe(const LossVector& loss) {
  epoch_observe(*this, n_, t_, awake_, epochs_, log_prior_, loss,
                /*squared_evidence=*/true, prior_);
}

void Squint::mark_labeled(std::span<const int> indices) {
  for (int i : indices) {
    if (i < 0 || i >= n_) throw StructuralError("label index out of range");
    awake_.sleep(i);
    epochs_[static_cast<size_t>(i)].clear();
    epochs_[static_cast<size_t>(i)].shrink_to_fit();
  }
}

}  // namespace adaprod
