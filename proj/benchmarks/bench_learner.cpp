#include <benchmark/benchmark.h>

#include <random>

#include "adaprod/learner.hpp"

using namespace adaprod;

namespace {

std::vector<double> losses_for(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(static_cast<size_t>(n));
  for (auto& v : out) v = unit(gen);
  return out;
}

void drive(AdaProdLearner& learner, std::mt19937_64& gen,
           std::vector<double>& rhat, int rounds) {
  for (int t = 0; t < rounds; ++t) {
    ProbabilityVector p = learner.distribution(rhat);
    LossVector loss(losses_for(gen, learner.pool_size()), learner.round());
    Prediction pred = learner.predict(loss);
    learner.observe(loss, p, rhat, pred.rhat);
    rhat = pred.rhat;
  }
}

}  // namespace

// Full rounds with the table growing underneath, the shape a long
// expert-mode run sees.
static void BM_LearnerRound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(1);
  AdaProdLearner learner(n);
  std::vector<double> rhat(static_cast<size_t>(n), 0.0);
  std::size_t records = 0;
  for (auto _ : state) {
    drive(learner, gen, rhat, 1);
    records += learner.expert_count();
  }
  state.SetItemsProcessed(static_cast<int64_t>(records));
}
BENCHMARK(BM_LearnerRound)->Arg(8)->Arg(64)->Arg(256);

// The fixed-point search alone on a well-aged table.
static void BM_FixedPoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(2);
  AdaProdLearner learner(n);
  std::vector<double> rhat(static_cast<size_t>(n), 0.0);
  drive(learner, gen, rhat, 300);
  LossVector lhat(losses_for(gen, n), learner.round());
  for (auto _ : state) {
    Prediction pred = learner.predict(lhat);
    benchmark::DoNotOptimize(pred.alpha);
  }
}
BENCHMARK(BM_FixedPoint)->Arg(8)->Arg(64)->Arg(256);

static void BM_Distribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(3);
  AdaProdLearner learner(n);
  std::vector<double> rhat(static_cast<size_t>(n), 0.0);
  drive(learner, gen, rhat, 300);
  for (auto _ : state) {
    ProbabilityVector p = learner.distribution(rhat);
    benchmark::DoNotOptimize(p.values().data());
  }
}
BENCHMARK(BM_Distribution)->Arg(8)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
