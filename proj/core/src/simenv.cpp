#include "adaprod/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adaprod/loss_metrics.hpp"
#include "adaprod/numeric.hpp"

namespace adaprod {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

class StationaryNoisy final : public Environment {
 public:
  StationaryNoisy(std::vector<double> mu, double sigma)
      : mu_(std::move(mu)), sigma_(sigma) {
    if (mu_.empty()) throw StructuralError("empty mean vector");
    if (sigma_ < 0.0) throw ContractError("sigma must be non-negative");
    for (double m : mu_)
      if (!(m >= 0.0 && m <= 1.0))
        throw ContractError("mean entry outside [0, 1]");
    expected_.reserve(mu_.size());
    for (double m : mu_) expected_.push_back(clamped_gaussian_mean(m, sigma_));
  }

  int pool_size() const override { return static_cast<int>(mu_.size()); }

  LossVector next_losses(int round, Rng& rng) override {
    std::vector<double> out(mu_.size());
    for (size_t i = 0; i < mu_.size(); ++i)
      out[i] = sigma_ == 0.0 ? mu_[i] : clamp01(mu_[i] + sigma_ * rng.gaussian());
    return LossVector(std::move(out), round);
  }

  std::optional<std::vector<double>> expected_losses(int) const override {
    return expected_;
  }

 private:
  std::vector<double> mu_;
  double sigma_;
  std::vector<double> expected_;
};

class GreedyTrap final : public Environment {
 public:
  GreedyTrap(double epsilon, int copies) : epsilon_(epsilon), copies_(copies) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
      throw ContractError("epsilon must lie strictly inside (0, 1/2)");
    if (copies < 1) throw ContractError("need at least one copy");
  }

  int pool_size() const override { return 3 * copies_; }

  LossVector next_losses(int round, Rng& rng) override {
    std::vector<double> out(static_cast<size_t>(pool_size()));
    for (int c = 0; c < copies_; ++c) {
      bool heads = rng.uniform01() < 0.5;
      out[static_cast<size_t>(3 * c)] = epsilon_;
      out[static_cast<size_t>(3 * c + 1)] = heads ? 0.0 : 1.0;
      out[static_cast<size_t>(3 * c + 2)] = heads ? 1.0 : 0.0;
    }
    return LossVector(std::move(out), round);
  }

  std::optional<std::vector<double>> expected_losses(int) const override {
    std::vector<double> out(static_cast<size_t>(pool_size()), 0.5);
    for (int c = 0; c < copies_; ++c)
      out[static_cast<size_t>(3 * c)] = epsilon_;
    return out;
  }

 private:
  double epsilon_;
  int copies_;
};

class Drifting final : public Environment {
 public:
  Drifting(std::function<std::vector<double>(int)> schedule, int n,
           double sigma)
      : schedule_(std::move(schedule)), n_(n), sigma_(sigma) {
    if (n < 1) throw StructuralError("pool size must be at least 1");
    if (sigma_ < 0.0) throw ContractError("sigma must be non-negative");
  }

  int pool_size() const override { return n_; }

  LossVector next_losses(int round, Rng& rng) override {
    std::vector<double> mu = clamped_schedule(round);
    std::vector<double> out(mu.size());
    for (size_t i = 0; i < mu.size(); ++i)
      out[i] = sigma_ == 0.0 ? mu[i] : clamp01(mu[i] + sigma_ * rng.gaussian());
    return LossVector(std::move(out), round);
  }

  std::optional<std::vector<double>> expected_losses(int round) const override {
    std::vector<double> mu = clamped_schedule(round);
    for (double& m : mu) m = clamped_gaussian_mean(m, sigma_);
    return mu;
  }

  long clamp_count() const override { return clamps_; }

 private:
  std::vector<double> clamped_schedule(int round) const {
    std::vector<double> mu = schedule_(round);
    if (static_cast<int>(mu.size()) != n_)
      throw StructuralError("schedule emitted the wrong pool size");
    for (double& m : mu) {
      if (m < 0.0 || m > 1.0) {
        if (clamps_++ == 0)
          std::cerr << "drifting schedule left [0, 1]; clamping\n";
        m = clamp01(m);
      }
    }
    return mu;
  }

  std::function<std::vector<double>(int)> schedule_;
  int n_;
  double sigma_;
  mutable long clamps_ = 0;
};

class AdversarialSwap final : public Environment {
 public:
  AdversarialSwap(int n, int period, double low, double high)
      : n_(n), period_(period), low_(low), high_(high) {
    if (n < 1) throw StructuralError("pool size must be at least 1");
    if (period < 1) throw ContractError("period must be at least 1");
    if (!(low >= 0.0 && low <= 1.0 && high >= 0.0 && high <= 1.0))
      throw ContractError("levels must lie in [0, 1]");
  }

  int pool_size() const override { return n_; }

  LossVector next_losses(int round, Rng&) override {
    return LossVector(*expected_losses(round), round);
  }

  std::optional<std::vector<double>> expected_losses(int round) const override {
    std::vector<double> out(static_cast<size_t>(n_), high_);
    int favored = ((round - 1) / period_) % n_;
    out[static_cast<size_t>(favored)] = low_;
    return out;
  }

 private:
  int n_;
  int period_;
  double low_, high_;
};

class SoftmaxReplay final : public Environment {
 public:
  SoftmaxReplay(const std::string& path, ReplayTransform transform) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open replay file " + path);
    std::string line;
    long line_no = 0;
    int expected_round = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ContractError("replay line " + std::to_string(line_no) +
                            ": invalid JSON (" + e.what() + ")");
      }
      if (!record.is_object() || !record.contains("round") ||
          !record.contains("softmax"))
        throw ContractError("replay line " + std::to_string(line_no) +
                            ": need keys \"round\" and \"softmax\"");
      int round = record["round"].get<int>();
      if (round != expected_round)
        throw ContractError("replay line " + std::to_string(line_no) +
                            ": round " + std::to_string(round) +
                            " breaks the contiguous sequence (expected " +
                            std::to_string(expected_round) + ")");
      std::vector<std::vector<double>> rows;
      try {
        rows = record["softmax"].get<std::vector<std::vector<double>>>();
      } catch (const nlohmann::json::exception&) {
        throw ContractError("replay line " + std::to_string(line_no) +
                            ": softmax must be an array of rows");
      }
      try {
        SoftmaxMatrix sm(std::move(rows));
        if (!losses_.empty() &&
            sm.points() != static_cast<int>(losses_.front().size()))
          throw ContractError("pool size changed");
        LossVector loss = transform == ReplayTransform::Uncertainty
                              ? uncertainty_loss(sm, round)
                              : entropy_loss(sm, round);
        losses_.emplace_back(loss.values().begin(), loss.values().end());
      } catch (const Error& e) {
        throw ContractError("replay line " + std::to_string(line_no) + ": " +
                            e.what());
      }
      ++expected_round;
    }
    if (losses_.empty()) throw ContractError("replay file has no rounds");
  }

  int pool_size() const override {
    return static_cast<int>(losses_.front().size());
  }

  int max_rounds() const override { return static_cast<int>(losses_.size()); }

  LossVector next_losses(int round, Rng&) override {
    if (round < 1 || round > max_rounds())
      throw ContractError("replay exhausted at round " + std::to_string(round));
    return LossVector(losses_[static_cast<size_t>(round - 1)], round);
  }

  std::optional<std::vector<double>> expected_losses(int round) const override {
    if (round < 1 || round > max_rounds()) return std::nullopt;
    return losses_[static_cast<size_t>(round - 1)];
  }

 private:
  std::vector<std::vector<double>> losses_;
};

}  // namespace

int EnvSpec::pool_size() const {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StationaryNoisyParams>)
          return static_cast<int>(p.mu.size());
        else if constexpr (std::is_same_v<T, DriftingParams>)
          return std::visit(
              [](const auto& s) { return static_cast<int>(s.base.size()); },
              p.schedule);
        else if constexpr (std::is_same_v<T, GreedyTrapParams>)
          return 3 * p.copies;
        else if constexpr (std::is_same_v<T, AdversarialSwapParams>)
          return p.n;
        else
          return -1;  // replay: known only after opening the file
      },
      params);
}

std::unique_ptr<Environment> make_stationary(std::vector<double> mu,
                                             double sigma) {
  return std::make_unique<StationaryNoisy>(std::move(mu), sigma);
}

std::unique_ptr<Environment> make_greedy_trap(double epsilon, int copies) {
  return std::make_unique<GreedyTrap>(epsilon, copies);
}

std::unique_ptr<Environment> make_drifting(
    std::function<std::vector<double>(int)> mu_schedule, int n, double sigma) {
  return std::make_unique<Drifting>(std::move(mu_schedule), n, sigma);
}

std::unique_ptr<Environment> make_drifting(const DriftingParams& params) {
  const double sigma = params.sigma;
  if (const auto* sin_p = std::get_if<DriftSinusoid>(&params.schedule)) {
    DriftSinusoid s = *sin_p;
    if (s.base.empty()) throw StructuralError("empty schedule base");
    if (s.period <= 0.0) throw ContractError("period must be positive");
    const int n = static_cast<int>(s.base.size());
    auto schedule = [s, n](int round) {
      std::vector<double> mu(s.base);
      for (int i = 0; i < n; ++i) {
        double phase = static_cast<double>(i) / static_cast<double>(n);
        mu[static_cast<size_t>(i)] +=
            s.amplitude * std::sin(2.0 * M_PI *
                                   (static_cast<double>(round) / s.period +
                                    phase));
      }
      return mu;
    };
    return make_drifting(schedule, n, sigma);
  }
  DriftLinearSwap s = std::get<DriftLinearSwap>(params.schedule);
  if (s.base.empty()) throw StructuralError("empty schedule base");
  const int n = static_cast<int>(s.base.size());
  if (s.first < 0 || s.first >= n || s.second < 0 || s.second >= n ||
      s.first == s.second)
    throw ContractError("swap indices out of range");
  if (s.over_rounds < 1) throw ContractError("swap horizon must be positive");
  auto schedule = [s, n](int round) {
    std::vector<double> mu(s.base);
    double frac = std::min(1.0, static_cast<double>(round) /
                                    static_cast<double>(s.over_rounds));
    double a = s.base[static_cast<size_t>(s.first)];
    double b = s.base[static_cast<size_t>(s.second)];
    mu[static_cast<size_t>(s.first)] = a + frac * (b - a);
    mu[static_cast<size_t>(s.second)] = b + frac * (a - b);
    return mu;
  };
  return make_drifting(schedule, n, sigma);
}

std::unique_ptr<Environment> make_adversarial_swap(int n, int period,
                                                   double low, double high) {
  return std::make_unique<AdversarialSwap>(n, period, low, high);
}

std::unique_ptr<Environment> make_softmax_replay(const std::string& path,
                                                 ReplayTransform transform) {
  return std::make_unique<SoftmaxReplay>(path, transform);
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
  return std::visit(
      [](const auto& p) -> std::unique_ptr<Environment> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StationaryNoisyParams>)
          return make_stationary(p.mu, p.sigma);
        else if constexpr (std::is_same_v<T, DriftingParams>)
          return make_drifting(p);
        else if constexpr (std::is_same_v<T, GreedyTrapParams>)
          return make_greedy_trap(p.epsilon, p.copies);
        else if constexpr (std::is_same_v<T, AdversarialSwapParams>)
          return make_adversarial_swap(p.n, p.period, p.low, p.high);
        else
          return make_softmax_replay(p.path, p.transform);
      },
      spec.params);
}

}  // namespace adaprod
