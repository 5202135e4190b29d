#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adaprod/types.hpp"

namespace adaprod {

/// Row-stochastic class scores, one row per pool point.
class SoftmaxMatrix {
 public:
  explicit SoftmaxMatrix(std::vector<std::vector<double>> rows);

  int points() const { return static_cast<int>(rows_.size()); }
  int classes() const { return classes_; }
  std::span<const double> row(int i) const { return rows_[static_cast<size_t>(i)]; }

 private:
  std::vector<std::vector<double>> rows_;
  int classes_ = 0;
};

/// Non-negative informativeness scores with an optional a-priori upper
/// bound. Without the bound, loss conversion falls back to per-round max
/// normalization, which breaks cross-round comparability.
class InformativenessScores {
 public:
  InformativenessScores(std::vector<double> values,
                        std::optional<double> declared_max);

  std::span<const double> values() const { return values_; }
  std::optional<double> declared_max() const { return declared_max_; }

 private:
  std::vector<double> values_;
  std::optional<double> declared_max_;
};

/// loss_i = max_j row_ij, in [1/k, 1].
LossVector uncertainty_loss(const SoftmaxMatrix& sm, int round);

/// loss_i = 1 - H(row_i) / log k, with 0 log 0 = 0. Requires k >= 2.
LossVector entropy_loss(const SoftmaxMatrix& sm, int round);

/// loss_i = 1 - s_i / declared_max; when no bound is declared the round's
/// own max is used (all-ones if every score is zero).
LossVector normalized_score_loss(const InformativenessScores& scores,
                                 int round);

}  // namespace adaprod
