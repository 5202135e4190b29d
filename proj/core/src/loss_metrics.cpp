#include "adaprod/loss_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adaprod {

SoftmaxMatrix::SoftmaxMatrix(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw StructuralError("softmax matrix has no rows");
  classes_ = static_cast<int>(rows_.front().size());
  if (classes_ < 1) throw StructuralError("softmax rows are empty");
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (static_cast<int>(row.size()) != classes_)
      throw StructuralError("softmax row " + std::to_string(i) +
                            " has inconsistent length");
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0)
        throw ContractError("softmax row " + std::to_string(i) +
                            " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ContractError("softmax row " + std::to_string(i) + " sums to " +
                          std::to_string(sum));
  }
}

InformativenessScores::InformativenessScores(std::vector<double> values,
                                             std::optional<double> declared_max)
    : values_(std::move(values)), declared_max_(declared_max) {
  if (values_.empty()) throw StructuralError("empty score vector");
  if (declared_max_ && !(*declared_max_ > 0.0))
    throw ContractError("declared maximum must be positive");
  for (double v : values_) {
    if (v < 0.0) throw ContractError("negative informativeness score");
    if (declared_max_ && v > *declared_max_ + 1e-12)
      throw ContractError("score " + std::to_string(v) +
                          " exceeds the declared maximum");
  }
}

LossVector uncertainty_loss(const SoftmaxMatrix& sm, int round) {
  std::vector<double> out(static_cast<size_t>(sm.points()));
  for (int i = 0; i < sm.points(); ++i) {
    auto row = sm.row(i);
    out[static_cast<size_t>(i)] = *std::max_element(row.begin(), row.end());
  }
  return LossVector(std::move(out), round);
}

LossVector entropy_loss(const SoftmaxMatrix& sm, int round) {
  if (sm.classes() < 2)
    throw ContractError("entropy normalization needs at least two classes");
  const double log_k = std::log(static_cast<double>(sm.classes()));
  std::vector<double> out(static_cast<size_t>(sm.points()));
  for (int i = 0; i < sm.points(); ++i) {
    double h = 0.0;
    for (double v : sm.row(i))
      if (v > 0.0) h -= v * std::log(v);
    double loss = 1.0 - h / log_k;
    out[static_cast<size_t>(i)] = std::min(1.0, std::max(0.0, loss));
  }
  return LossVector(std::move(out), round);
}

LossVector normalized_score_loss(const InformativenessScores& scores,
                                 int round) {
  auto vals = scores.values();
  double bound;
  if (scores.declared_max()) {
    bound = *scores.declared_max();
  } else {
    bound = *std::max_element(vals.begin(), vals.end());
    if (bound <= 0.0) {
      // All-zero scores carry no information; every point is maximally
      // uninteresting.
      return LossVector(std::vector<double>(vals.size(), 1.0), round);
    }
  }
  std::vector<double> out(vals.size());
  for (size_t i = 0; i < vals.size(); ++i)
    out[i] = std::min(1.0, std::max(0.0, 1.0 - vals[i] / bound));
  return LossVector(std::move(out), round);
}

}  // namespace adaprod
