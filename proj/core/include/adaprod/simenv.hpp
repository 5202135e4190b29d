#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adaprod/rng.hpp"
#include "adaprod/types.hpp"

namespace adaprod {

/// A loss-stream oracle. Implementations must be deterministic given the
/// construction parameters and the draws taken from the supplied source;
/// the per-round losses never depend on what the learner labeled.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int pool_size() const = 0;
  virtual LossVector next_losses(int round, Rng& rng) = 0;

  /// True per-point mean at the given round, when the environment knows
  /// it (synthetic ones do; replay returns its deterministic values).
  virtual std::optional<std::vector<double>> expected_losses(int round) const {
    (void)round;
    return std::nullopt;
  }

  /// Rounds available, bounded for replay streams only.
  virtual int max_rounds() const { return std::numeric_limits<int>::max(); }

  /// How many schedule values had to be clamped into [0, 1].
  virtual long clamp_count() const { return 0; }
};

enum class ReplayTransform { Uncertainty, Entropy };

struct StationaryNoisyParams {
  std::vector<double> mu;
  double sigma = 0.0;
};

struct DriftSinusoid {
  std::vector<double> base;
  double amplitude = 0.0;
  double period = 1.0;
};

struct DriftLinearSwap {
  std::vector<double> base;
  int first = 0;
  int second = 1;
  int over_rounds = 1;
};

struct DriftingParams {
  std::variant<DriftSinusoid, DriftLinearSwap> schedule;
  double sigma = 0.0;
};

struct GreedyTrapParams {
  double epsilon = 0.25;
  int copies = 1;
};

struct AdversarialSwapParams {
  int n = 2;
  int period = 1;
  double low = 0.0;
  double high = 1.0;
};

struct SoftmaxReplayParams {
  std::string path;
  ReplayTransform transform = ReplayTransform::Uncertainty;
};

struct EnvSpec {
  std::uint64_t seed = 0;  // salt folded into the run's environment stream
  std::variant<StationaryNoisyParams, DriftingParams, GreedyTrapParams,
               AdversarialSwapParams, SoftmaxReplayParams>
      params;

  int pool_size() const;
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

/// Emits clamp(mu_i + sigma * gaussian, 0, 1) independently per entry.
std::unique_ptr<Environment> make_stationary(std::vector<double> mu,
                                             double sigma);

/// Three-point coin-flip pattern (epsilon, 0, 1) / (epsilon, 1, 0),
/// replicated `copies` times with independent coins. The first point of
/// each triple is optimal in expectation while every realization tempts a
/// greedy rule toward the others.
std::unique_ptr<Environment> make_greedy_trap(double epsilon, int copies);

/// clamp(mu(round) + noise); out-of-range schedule values are clamped and
/// counted.
std::unique_ptr<Environment> make_drifting(
    std::function<std::vector<double>(int)> mu_schedule, int n, double sigma);

std::unique_ptr<Environment> make_drifting(const DriftingParams& params);

/// Deterministic rotation: one point at `low`, the rest at `high`; the
/// favored point advances every `period` rounds.
std::unique_ptr<Environment> make_adversarial_swap(int n, int period,
                                                   double low, double high);

/// JSON-Lines replay: one object per round with keys "round" (contiguous
/// from 1) and "softmax" (n rows of k class scores). Losses are produced
/// by the chosen transform at load time; malformed input reports the
/// offending line number.
std::unique_ptr<Environment> make_softmax_replay(const std::string& path,
                                                 ReplayTransform transform);

}  // namespace adaprod
