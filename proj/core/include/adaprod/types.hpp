#pragma once

#include <span>
#include <vector>

#include "adaprod/errors.hpp"

namespace adaprod {

/// Which pool entries are still unlabeled. Bits only ever flip from awake
/// to asleep; the owning run enforces monotonicity through sleep().
class AwakeMask {
 public:
  explicit AwakeMask(int n);

  int size() const { return static_cast<int>(bits_.size()); }
  bool awake(int i) const { return bits_[static_cast<size_t>(i)] != 0; }
  int awake_count() const { return awake_count_; }

  /// Marks an awake entry asleep. Throws ContractError if already asleep.
  void sleep(int i);

  std::vector<int> awake_indices() const;

 private:
  std::vector<char> bits_;
  int awake_count_ = 0;
};

/// Per-point losses for one round, every entry in [0, 1].
class LossVector {
 public:
  LossVector(std::vector<double> values, int round);

  int size() const { return static_cast<int>(values_.size()); }
  int round() const { return round_; }
  double operator[](int i) const { return values_[static_cast<size_t>(i)]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
  int round_;
};

/// A distribution over the pool: non-negative, sums to one within 1e-12,
/// and exactly zero on asleep entries.
class ProbabilityVector {
 public:
  ProbabilityVector(std::vector<double> values, const AwakeMask& awake);

  /// Normalizes non-negative weights over the awake set. A single
  /// sum-then-divide pass, repeated once if the drift exceeds 1e-12.
  static ProbabilityVector normalized(std::vector<double> weights,
                                      const AwakeMask& awake);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<size_t>(i)]; }
  std::span<const double> values() const { return values_; }
  double max_entry() const;

 private:
  ProbabilityVector() = default;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace adaprod
