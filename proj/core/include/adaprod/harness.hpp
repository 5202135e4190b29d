#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaprod/baselines.hpp"
#include "adaprod/learner.hpp"
#include "adaprod/regret.hpp"
#include "adaprod/simenv.hpp"

namespace adaprod {

enum class Algo {
  AdaProdPlus,
  OptimisticAmlProd,
  AdaNormalHedge,
  Squint,
  Greedy,
  Uniform,
};

std::string algo_name(Algo algo);
Algo algo_from_name(const std::string& name);

struct LearnerSpec {
  Algo algo = Algo::AdaProdPlus;
  std::optional<double> rate_numerator_sq;  // prod-family learners
  AdaNormalHedge::Prior prior = AdaNormalHedge::Prior::InverseSquare;
};

enum class RunMode {
  Expert,       // fixed horizon, nothing gets labeled
  Acquisition,  // label b_t points per round until n_end
};

struct RunConfig {
  std::string run_id = "run";
  std::vector<LearnerSpec> learners;
  EnvSpec env;
  RunMode mode = RunMode::Expert;

  int horizon = 0;  // expert mode rounds
  int batch = 1;    // per-round batch size (both modes)

  int n_start = 0;  // acquisition: uniformly labeled before round 1
  int n_end = 0;    // acquisition: stop once this many are labeled
  std::vector<int> b_schedule;  // acquisition: optional per-round sizes

  std::vector<std::uint64_t> seeds;
  std::string out_path;
  int threads = 1;
  bool keep_raw = false;  // retain per-round (rho, loss) for audits
  std::string option_label;  // free-form training-regime tag, metadata only
};

struct CsvRow {
  std::string run_id;
  std::string algo;
  std::uint64_t seed = 0;
  int round = 0;
  double mixture_loss = 0.0;
  double cum_regret_best_fixed = 0.0;
  double cum_regret_dynamic = 0.0;
  int n_labeled = 0;
  bool cap_active = false;
};

struct RawRound {
  std::vector<double> rho;
  std::vector<double> loss;
  std::vector<int> comparator;
  std::vector<int> awake;
  int b = 1;
};

struct RunSummary {
  std::string algo;
  std::uint64_t seed = 0;
  int rounds = 0;
  double final_best_fixed = 0.0;
  double final_dynamic = 0.0;
  double vt_realized = 0.0;   // sum_t ||r_t - rhat_t||_inf^2
  double vt_holder = 0.0;     // 4 sum_t ||l_t - l_{t-1}||_inf^2
  double dt_drift = 0.0;      // sum_t ||E r_t - E r_{t-1}||_inf
  bool dt_from_means = false; // drift used environment means, not realizations
  long cap_active_rounds = 0;
  long env_clamp_count = 0;
  std::uint64_t loss_stream_hash = 0;
  InvariantCounters invariants;
  double wall_ms = 0.0;
};

struct RunReport {
  std::vector<std::string> header;  // metadata, '#'-prefixed in the CSV
  std::vector<CsvRow> rows;
  std::vector<RunSummary> summaries;
  std::vector<std::vector<RawRound>> raw;  // parallel to summaries when kept

  std::string csv() const;
  void write_csv(const std::string& path) const;
};

/// Rejects bad configurations before any work happens. Opens replay
/// files so malformed streams fail here too.
void validate_config(const RunConfig& config);

/// The acquisition / simulation loop for a single learner.
RunReport run_active_learning(const RunConfig& config);

/// Runs every learner on identical loss realizations per seed (the
/// environment stream is learner-independent; the report records a hash
/// of each stream and refuses to pass mismatches through).
RunReport run_expert_comparison(const RunConfig& config);

}  // namespace adaprod
