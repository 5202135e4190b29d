#include <benchmark/benchmark.h>

#include <random>

#include "adaprod/batch_sampler.hpp"

using namespace adaprod;

namespace {

ProbabilityVector spiky_distribution(int n) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AwakeMask awake(n);
  std::vector<double> w(static_cast<size_t>(n));
  for (auto& v : w) v = 0.001 + std::pow(unit(gen), 4.0);
  return ProbabilityVector::normalized(std::move(w), awake);
}

}  // namespace

static void BM_CapProbabilities(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  AwakeMask awake(n);
  ProbabilityVector p = spiky_distribution(n);
  const int b = std::max(2, n / 16);
  for (auto _ : state) {
    ProbabilityVector q = cap_probabilities(p, b, awake);
    benchmark::DoNotOptimize(q.values().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CapProbabilities)->Arg(256)->Arg(4096);

static void BM_DepRound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  AwakeMask awake(n);
  ProbabilityVector p = spiky_distribution(n);
  const int b = std::max(2, n / 16);
  ProbabilityVector q = cap_probabilities(p, b, awake);
  std::vector<double> rho(q.values().begin(), q.values().end());
  for (double& v : rho) v = std::min(1.0, v * b);
  Rng rng(11);
  for (auto _ : state) {
    auto chosen = dep_round(rho, rng);
    benchmark::DoNotOptimize(chosen.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DepRound)->Arg(256)->Arg(4096);

static void BM_SampleBatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  AwakeMask awake(n);
  ProbabilityVector p = spiky_distribution(n);
  Rng rng(13);
  for (auto _ : state) {
    BatchPlan plan = sample_batch(p, std::max(2, n / 16), awake, rng);
    benchmark::DoNotOptimize(plan.chosen.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleBatch)->Arg(256)->Arg(4096);
