#include "adaprod/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace adaprod {

AwakeMask::AwakeMask(int n) {
  if (n < 1) throw StructuralError("pool size must be at least 1");
  bits_.assign(static_cast<size_t>(n), 1);
  awake_count_ = n;
}

void AwakeMask::sleep(int i) {
  if (i < 0 || i >= size()) throw StructuralError("index out of range");
  if (!bits_[static_cast<size_t>(i)])
    throw ContractError("point " + std::to_string(i) + " is already asleep");
  bits_[static_cast<size_t>(i)] = 0;
  --awake_count_;
}

std::vector<int> AwakeMask::awake_indices() const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(awake_count_));
  for (int i = 0; i < size(); ++i)
    if (bits_[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

LossVector::LossVector(std::vector<double> values, int round)
    : values_(std::move(values)), round_(round) {
  if (values_.empty()) throw StructuralError("empty loss vector");
  if (round_ < 1) throw StructuralError("round must be at least 1");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ContractError("loss entry " + std::to_string(v) +
                          " outside [0, 1]");
  }
}

ProbabilityVector::ProbabilityVector(std::vector<double> values,
                                     const AwakeMask& awake)
    : values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != awake.size())
    throw StructuralError("probability vector length does not match pool");
  if (awake.awake_count() == 0)
    throw ContractError("no awake points to distribute mass over");
  double sum = 0.0;
  for (int i = 0; i < awake.size(); ++i) {
    double v = values_[static_cast<size_t>(i)];
    if (v < 0.0) throw ContractError("negative probability entry");
    if (!awake.awake(i) && v != 0.0)
      throw ContractError("nonzero mass on asleep point " + std::to_string(i));
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ContractError("probabilities sum to " + std::to_string(sum));
}

ProbabilityVector ProbabilityVector::normalized(std::vector<double> weights,
                                                const AwakeMask& awake) {
  if (static_cast<int>(weights.size()) != awake.size())
    throw StructuralError("weight vector length does not match pool");
  if (awake.awake_count() == 0)
    throw ContractError("no awake points to distribute mass over");
  double sum = 0.0;
  for (int i = 0; i < awake.size(); ++i) {
    if (!awake.awake(i)) weights[static_cast<size_t>(i)] = 0.0;
    if (weights[static_cast<size_t>(i)] < 0.0)
      throw ContractError("negative weight");
    sum += weights[static_cast<size_t>(i)];
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw ContractError("weights do not sum to a positive finite value");
  for (double& w : weights) w /= sum;
  double drift = std::accumulate(weights.begin(), weights.end(), 0.0) - 1.0;
  if (std::abs(drift) > 1e-12) {
    double again = 1.0 + drift;
    for (double& w : weights) w /= again;
  }
  ProbabilityVector p;
  p.values_ = std::move(weights);
  return p;
}

double ProbabilityVector::max_entry() const {
  return *std::max_element(values_.begin(), values_.end());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructuralError("dot: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace adaprod
