#include "adaprod/regret.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adaprod {

std::vector<double> instantaneous_regret(const ProbabilityVector& p,
                                         const LossVector& loss,
                                         const AwakeMask& awake) {
  if (p.size() != loss.size() || loss.size() != awake.size())
    throw StructuralError("instantaneous_regret: length mismatch");
  double mixture = dot(p.values(), loss.values());
  std::vector<double> r(static_cast<size_t>(loss.size()), 0.0);
  for (int i = 0; i < loss.size(); ++i)
    if (awake.awake(i)) r[static_cast<size_t>(i)] = mixture - loss[i];
  return r;
}

std::vector<double> batch_instantaneous_regret(std::span<const double> rho,
                                               const LossVector& loss, int b,
                                               const AwakeMask& awake) {
  if (static_cast<int>(rho.size()) != loss.size() ||
      loss.size() != awake.size())
    throw StructuralError("batch_instantaneous_regret: length mismatch");
  if (b < 1) throw ContractError("batch size must be at least 1");
  double total = 0.0;
  for (double v : rho) {
    if (v < -1e-12 || v > 1.0 + 1e-12)
      throw ContractError("scaled probability outside [0, 1]");
    total += v;
  }
  if (std::abs(total - static_cast<double>(b)) > 1e-9)
    throw ContractError("scaled probabilities sum to " +
                        std::to_string(total) + ", expected " +
                        std::to_string(b));
  double mixture = dot(rho, loss.values()) / static_cast<double>(b);
  std::vector<double> r(static_cast<size_t>(loss.size()), 0.0);
  for (int i = 0; i < loss.size(); ++i)
    if (awake.awake(i)) r[static_cast<size_t>(i)] = mixture - loss[i];
  return r;
}

RegretLedger::RegretLedger(int n) : n_(n), cum_(static_cast<size_t>(n), 0.0) {
  if (n < 1) throw StructuralError("pool size must be at least 1");
}

void RegretLedger::record(LedgerRound round) {
  if (round.awake.size() != round.regret.size())
    throw StructuralError("ledger row: awake/regret length mismatch");
  if (round.round != rounds() + 1)
    throw StructuralError("ledger rounds must be recorded in order");
  for (size_t k = 0; k < round.awake.size(); ++k) {
    int i = round.awake[k];
    if (i < 0 || i >= n_) throw StructuralError("ledger row: index range");
    cum_[static_cast<size_t>(i)] += round.regret[k];
  }
  for (int slot : round.comparator) {
    auto it = std::find(round.awake.begin(), round.awake.end(), slot);
    if (it != round.awake.end())
      dynamic_cum_ +=
          round.regret[static_cast<size_t>(it - round.awake.begin())];
  }
  gap_sum_ += round.prediction_gap_sq;
  rows_.push_back(std::move(round));
}

const LedgerRound& RegretLedger::at(int t) const {
  if (t < 1 || t > rounds()) throw StructuralError("ledger round out of range");
  return rows_[static_cast<size_t>(t - 1)];
}

double RegretLedger::cumulative_against(
    std::span<const int> comparator_per_round) const {
  if (static_cast<int>(comparator_per_round.size()) != rounds())
    throw StructuralError("comparator sequence length != recorded rounds");
  double total = 0.0;
  for (int t = 0; t < rounds(); ++t) {
    const LedgerRound& row = rows_[static_cast<size_t>(t)];
    int want = comparator_per_round[static_cast<size_t>(t)];
    auto it = std::find(row.awake.begin(), row.awake.end(), want);
    if (it != row.awake.end())
      total += row.regret[static_cast<size_t>(it - row.awake.begin())];
  }
  return total;
}

double RegretLedger::cumulative_against_sets(
    const std::vector<std::vector<int>>& slots_per_round) const {
  if (static_cast<int>(slots_per_round.size()) != rounds())
    throw StructuralError("comparator sets length != recorded rounds");
  double total = 0.0;
  for (int t = 0; t < rounds(); ++t) {
    const LedgerRound& row = rows_[static_cast<size_t>(t)];
    for (int want : slots_per_round[static_cast<size_t>(t)]) {
      auto it = std::find(row.awake.begin(), row.awake.end(), want);
      if (it != row.awake.end())
        total += row.regret[static_cast<size_t>(it - row.awake.begin())];
    }
  }
  return total;
}

double RegretLedger::best_fixed() const {
  return *std::max_element(cum_.begin(), cum_.end());
}

double RegretLedger::best_fixed_set(int b) const {
  if (b < 1 || b > n_) throw ContractError("comparator set size out of range");
  std::vector<double> sorted = cum_;
  std::partial_sort(sorted.begin(), sorted.begin() + b, sorted.end(),
                    std::greater<>());
  double total = 0.0;
  for (int k = 0; k < b; ++k) total += sorted[static_cast<size_t>(k)];
  return total;
}

}  // namespace adaprod
