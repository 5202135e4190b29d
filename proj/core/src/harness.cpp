#include "adaprod/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <thread>

#include "adaprod/batch_sampler.hpp"

namespace adaprod {

namespace {

constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kSamplerStream = 2;
constexpr std::uint64_t kInitStream = 3;

std::uint64_t fnv1a(std::uint64_t hash, const void* data, size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::uint64_t fold_losses(std::uint64_t hash, const LossVector& loss) {
  for (int i = 0; i < loss.size(); ++i) {
    double v = loss[i];
    hash = fnv1a(hash, &v, sizeof(v));
  }
  return hash;
}

// One round's selection: scaled inclusion probabilities summing to b,
// the drawn indices, and whether capping bound.
struct Decision {
  std::vector<double> rho;
  std::vector<int> chosen;
  bool cap_active = false;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual Decision decide(int b, const AwakeMask& awake, Rng& sampler) = 0;
  virtual void absorb(const LossVector& loss) = 0;
  virtual void label(std::span<const int> indices) = 0;
  // The optimistic prediction in force this round (zeros when the
  // strategy does not predict).
  virtual std::span<const double> current_rhat() const = 0;
  virtual InvariantCounters invariants() const { return {}; }
};

class ProdStrategy final : public Strategy {
 public:
  ProdStrategy(int n, AdaProdLearner::Schedule schedule,
               std::optional<double> numerator_sq)
      : learner_(n, schedule, numerator_sq),
        rhat_(static_cast<size_t>(n), 0.0) {}

  Decision decide(int b, const AwakeMask& awake, Rng& sampler) override {
    ProbabilityVector p = learner_.distribution(rhat_);
    BatchPlan plan = sample_batch(p, b, awake, sampler);
    played_.emplace(std::move(p));
    return Decision{std::move(plan.scaled), std::move(plan.chosen),
                    plan.cap_was_active};
  }

  void absorb(const LossVector& loss) override {
    if (!played_) throw StructuralError("absorb before decide");
    Prediction next = learner_.predict(loss);
    learner_.observe(loss, *played_, rhat_, next.rhat);
    rhat_ = std::move(next.rhat);
    played_.reset();
  }

  void label(std::span<const int> indices) override {
    learner_.mark_labeled(indices);
    for (int i : indices) rhat_[static_cast<size_t>(i)] = 0.0;
  }

  std::span<const double> current_rhat() const override { return rhat_; }
  InvariantCounters invariants() const override {
    return learner_.invariants();
  }

 private:
  AdaProdLearner learner_;
  std::vector<double> rhat_;
  std::optional<ProbabilityVector> played_;
};

template <typename Learner>
class HedgeStrategy final : public Strategy {
 public:
  HedgeStrategy(int n, AdaNormalHedge::Prior prior)
      : learner_(n, prior), zeros_(static_cast<size_t>(n), 0.0) {}

  Decision decide(int b, const AwakeMask& awake, Rng& sampler) override {
    ProbabilityVector p = learner_.distribution();
    BatchPlan plan = sample_batch(p, b, awake, sampler);
    return Decision{std::move(plan.scaled), std::move(plan.chosen),
                    plan.cap_was_active};
  }

  void absorb(const LossVector& loss) override { learner_.observe(loss); }
  void label(std::span<const int> indices) override {
    learner_.mark_labeled(indices);
  }
  std::span<const double> current_rhat() const override { return zeros_; }

 private:
  Learner learner_;
  std::vector<double> zeros_;
};

class GreedyStrategy final : public Strategy {
 public:
  explicit GreedyStrategy(int n)
      : informativeness_(static_cast<size_t>(n), 0.0),
        zeros_(static_cast<size_t>(n), 0.0) {}

  Decision decide(int b, const AwakeMask& awake, Rng&) override {
    Decision d;
    d.chosen = greedy_select(informativeness_, awake, b);
    d.rho.assign(informativeness_.size(), 0.0);
    for (int i : d.chosen) d.rho[static_cast<size_t>(i)] = 1.0;
    return d;
  }

  void absorb(const LossVector& loss) override {
    for (int i = 0; i < loss.size(); ++i)
      informativeness_[static_cast<size_t>(i)] = 1.0 - loss[i];
  }

  void label(std::span<const int>) override {}
  std::span<const double> current_rhat() const override { return zeros_; }

 private:
  std::vector<double> informativeness_;
  std::vector<double> zeros_;
};

class UniformStrategy final : public Strategy {
 public:
  explicit UniformStrategy(int n) : zeros_(static_cast<size_t>(n), 0.0) {}

  Decision decide(int b, const AwakeMask& awake, Rng& sampler) override {
    Decision d;
    d.chosen = uniform_select(awake, b, sampler);
    d.rho.assign(zeros_.size(), 0.0);
    const double share =
        static_cast<double>(b) / static_cast<double>(awake.awake_count());
    for (int i = 0; i < static_cast<int>(zeros_.size()); ++i)
      if (awake.awake(i)) d.rho[static_cast<size_t>(i)] = share;
    return d;
  }

  void absorb(const LossVector&) override {}
  void label(std::span<const int>) override {}
  std::span<const double> current_rhat() const override { return zeros_; }

 private:
  std::vector<double> zeros_;
};

std::unique_ptr<Strategy> make_strategy(const LearnerSpec& spec, int n) {
  switch (spec.algo) {
    case Algo::AdaProdPlus:
      return std::make_unique<ProdStrategy>(
          n, AdaProdLearner::Schedule::AdaProdPlus, spec.rate_numerator_sq);
    case Algo::OptimisticAmlProd:
      return std::make_unique<ProdStrategy>(
          n, AdaProdLearner::Schedule::OptimisticAmlProd,
          spec.rate_numerator_sq);
    case Algo::AdaNormalHedge:
      return std::make_unique<HedgeStrategy<AdaNormalHedge>>(n, spec.prior);
    case Algo::Squint:
      return std::make_unique<HedgeStrategy<Squint>>(n, spec.prior);
    case Algo::Greedy:
      return std::make_unique<GreedyStrategy>(n);
    case Algo::Uniform:
      return std::make_unique<UniformStrategy>(n);
  }
  throw StructuralError("unknown algorithm");
}

struct SeedRun {
  std::vector<CsvRow> rows;
  RunSummary summary;
  std::vector<RawRound> raw;
  long env_clamps = 0;
};

int pool_size_of(const RunConfig& cfg) {
  int n = cfg.env.pool_size();
  if (n > 0) return n;
  return make_environment(cfg.env)->pool_size();  // replay: open the file
}

std::vector<int> batch_plan_for(const RunConfig& cfg, int n) {
  std::vector<int> plan;
  if (cfg.mode == RunMode::Expert) {
    plan.assign(static_cast<size_t>(cfg.horizon), cfg.batch);
    return plan;
  }
  int labeled = cfg.n_start;
  size_t k = 0;
  while (labeled < cfg.n_end) {
    int want = cfg.b_schedule.empty()
                   ? cfg.batch
                   : cfg.b_schedule[std::min(k, cfg.b_schedule.size() - 1)];
    int take = std::min(want, cfg.n_end - labeled);
    take = std::min(take, n - labeled);
    plan.push_back(take);
    labeled += take;
    ++k;
  }
  return plan;
}

SeedRun execute_seed(const RunConfig& cfg, const LearnerSpec& spec,
                     std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();

  auto env = make_environment(cfg.env);
  const int n = env->pool_size();
  const std::uint64_t env_master =
      seed ^ (cfg.env.seed * 0x9E3779B97F4A7C15ull);
  Rng env_rng = Rng::stream(env_master, kEnvStream);
  Rng sampler_rng = Rng::stream(seed, kSamplerStream);
  Rng init_rng = Rng::stream(seed, kInitStream);

  AwakeMask awake(n);
  RegretLedger ledger(n);
  auto strategy = make_strategy(spec, n);

  SeedRun out;
  out.summary.algo = algo_name(spec.algo);
  out.summary.seed = seed;

  int labeled = 0;
  if (cfg.mode == RunMode::Acquisition && cfg.n_start > 0) {
    std::vector<int> initial = uniform_select(awake, cfg.n_start, init_rng);
    strategy->label(initial);
    for (int i : initial) awake.sleep(i);
    labeled = cfg.n_start;
  }

  const std::vector<int> batches = batch_plan_for(cfg, n);
  std::uint64_t stream_hash = 0xcbf29ce484222325ull;
  std::vector<double> prev_loss;
  std::vector<double> prev_drift;
  bool means_known = true;

  for (size_t step = 0; step < batches.size(); ++step) {
    const int t = static_cast<int>(step) + 1;
    const int b = batches[step];

    LossVector loss = env->next_losses(t, env_rng);
    stream_hash = fold_losses(stream_hash, loss);

    Decision decision = strategy->decide(b, awake, sampler_rng);
    std::vector<double> regret =
        batch_instantaneous_regret(decision.rho, loss, b, awake);

    // Zero-sum identity under the capped distribution rho / b.
    double zs = 0.0;
    for (int i = 0; i < n; ++i)
      zs += decision.rho[static_cast<size_t>(i)] /
            static_cast<double>(b) * regret[static_cast<size_t>(i)];
    if (std::abs(zs) > 1e-12) ++out.summary.invariants.zero_sum;

    std::optional<std::vector<double>> means = env->expected_losses(t);
    if (!means) means_known = false;
    std::vector<double> reference =
        means ? *means
              : std::vector<double>(loss.values().begin(), loss.values().end());
    std::vector<double> attractiveness(reference.size());
    for (size_t i = 0; i < reference.size(); ++i)
      attractiveness[i] = 1.0 - reference[i];
    std::vector<int> slots = greedy_select(attractiveness, awake, b);

    const double mixture =
        dot(decision.rho, loss.values()) / static_cast<double>(b);

    std::span<const double> rhat = strategy->current_rhat();
    double gap = 0.0;
    LedgerRound row;
    row.round = t;
    row.mixture = mixture;
    row.awake = awake.awake_indices();
    row.regret.reserve(row.awake.size());
    for (int i : row.awake) {
      row.regret.push_back(regret[static_cast<size_t>(i)]);
      double d = regret[static_cast<size_t>(i)] - rhat[static_cast<size_t>(i)];
      gap = std::max(gap, d * d);
    }
    row.comparator = slots;
    row.prediction_gap_sq = gap;

    // Drift of the (expected, when known) instantaneous regret.
    std::vector<double> drift_vec(static_cast<size_t>(n), 0.0);
    {
      double ref_mix = 0.0;
      for (int i = 0; i < n; ++i)
        ref_mix += decision.rho[static_cast<size_t>(i)] /
                   static_cast<double>(b) * reference[static_cast<size_t>(i)];
      for (int i : row.awake)
        drift_vec[static_cast<size_t>(i)] =
            ref_mix - reference[static_cast<size_t>(i)];
    }
    if (!prev_drift.empty()) {
      double d = 0.0;
      for (int i = 0; i < n; ++i)
        d = std::max(d, std::abs(drift_vec[static_cast<size_t>(i)] -
                                 prev_drift[static_cast<size_t>(i)]));
      out.summary.dt_drift += d;
    }
    prev_drift = std::move(drift_vec);

    if (!prev_loss.empty()) {
      double d = 0.0;
      for (int i = 0; i < n; ++i)
        d = std::max(d, std::abs(loss[i] - prev_loss[static_cast<size_t>(i)]));
      out.summary.vt_holder += 4.0 * d * d;
    }
    prev_loss.assign(loss.values().begin(), loss.values().end());

    out.summary.vt_realized += gap;
    if (decision.cap_active) ++out.summary.cap_active_rounds;

    if (cfg.keep_raw) {
      RawRound raw;
      raw.rho = decision.rho;
      raw.loss.assign(loss.values().begin(), loss.values().end());
      raw.comparator = slots;
      raw.awake = row.awake;
      raw.b = b;
      out.raw.push_back(std::move(raw));
    }

    row.labeled_count = labeled;  // updated below for acquisition rows
    strategy->absorb(loss);

    if (cfg.mode == RunMode::Acquisition) {
      strategy->label(decision.chosen);
      for (int i : decision.chosen) awake.sleep(i);
      labeled += b;
      row.labeled_count = labeled;
    }
    ledger.record(std::move(row));

    CsvRow csv;
    csv.run_id = cfg.run_id;
    csv.algo = out.summary.algo;
    csv.seed = seed;
    csv.round = t;
    csv.mixture_loss = mixture;
    csv.cum_regret_best_fixed = ledger.best_fixed_set(b);
    csv.cum_regret_dynamic = ledger.dynamic_cumulative();
    csv.n_labeled = labeled;
    csv.cap_active = decision.cap_active;
    out.rows.push_back(std::move(csv));
  }

  out.summary.rounds = static_cast<int>(batches.size());
  out.summary.final_best_fixed =
      batches.empty() ? 0.0 : ledger.best_fixed_set(batches.back());
  out.summary.final_dynamic = ledger.dynamic_cumulative();
  out.summary.dt_from_means = means_known;
  out.summary.loss_stream_hash = stream_hash;
  {
    InvariantCounters inv = strategy->invariants();
    out.summary.invariants.zero_sum += inv.zero_sum;
    out.summary.invariants.rate_monotone += inv.rate_monotone;
    out.summary.invariants.prod_domain += inv.prod_domain;
  }
  out.summary.env_clamp_count = env->clamp_count();
  out.summary.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::AdaProdPlus:
      return "adaprod";
    case Algo::OptimisticAmlProd:
      return "oamlprod";
    case Algo::AdaNormalHedge:
      return "adanormalhedge";
    case Algo::Squint:
      return "squint";
    case Algo::Greedy:
      return "greedy";
    case Algo::Uniform:
      return "uniform";
  }
  throw StructuralError("unknown algorithm");
}

Algo algo_from_name(const std::string& name) {
  if (name == "adaprod") return Algo::AdaProdPlus;
  if (name == "oamlprod") return Algo::OptimisticAmlProd;
  if (name == "adanormalhedge") return Algo::AdaNormalHedge;
  if (name == "squint") return Algo::Squint;
  if (name == "greedy") return Algo::Greedy;
  if (name == "uniform") return Algo::Uniform;
  throw ValidationError("unknown algorithm \"" + name + "\"");
}

void validate_config(const RunConfig& cfg) {
  if (cfg.learners.empty()) throw ValidationError("empty learner list");
  if (cfg.seeds.empty()) throw ValidationError("empty seed list");
  if (cfg.threads < 1) throw ValidationError("threads must be at least 1");

  const int n = pool_size_of(cfg);  // replay files open and parse here
  if (cfg.mode == RunMode::Expert) {
    if (cfg.horizon < 1) throw ValidationError("horizon must be at least 1");
    if (cfg.batch < 1) throw ValidationError("batch size must be at least 1");
    if (cfg.batch > n)
      throw ValidationError("batch size exceeds the pool size");
    auto env = make_environment(cfg.env);
    if (cfg.horizon > env->max_rounds())
      throw ValidationError("horizon exceeds the replay stream length");
  } else {
    if (cfg.n_start < 0) throw ValidationError("n_start must be non-negative");
    if (cfg.n_end <= cfg.n_start)
      throw ValidationError("n_end must exceed n_start");
    if (cfg.n_end > n)
      throw ValidationError("n_end exceeds the pool size");
    for (int b : cfg.b_schedule)
      if (b < 1) throw ValidationError("batch schedule entries must be >= 1");
    if (cfg.b_schedule.empty() && cfg.batch < 1)
      throw ValidationError("batch size must be at least 1");
    auto env = make_environment(cfg.env);
    int rounds = static_cast<int>(batch_plan_for(cfg, n).size());
    if (rounds > env->max_rounds())
      throw ValidationError("acquisition needs more rounds than the replay "
                            "stream provides");
  }
}

std::string RunReport::csv() const {
  std::string out;
  for (const std::string& line : header) out += "# " + line + "\n";
  out +=
      "run_id,algo,seed,round,mixture_loss,cum_regret_best_fixed,"
      "cum_regret_dynamic,n_labeled,cap_active\n";
  for (const CsvRow& r : rows) {
    out += r.run_id;
    out += ',';
    out += r.algo;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.round);
    out += ',';
    out += format_double(r.mixture_loss);
    out += ',';
    out += format_double(r.cum_regret_best_fixed);
    out += ',';
    out += format_double(r.cum_regret_dynamic);
    out += ',';
    out += std::to_string(r.n_labeled);
    out += ',';
    out += r.cap_active ? '1' : '0';
    out += '\n';
  }
  return out;
}

void RunReport::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path);
  out << csv();
}

RunReport run_expert_comparison(const RunConfig& cfg) {
  validate_config(cfg);

  struct Task {
    size_t learner = 0;
    size_t seed = 0;
  };
  std::vector<Task> tasks;
  for (size_t l = 0; l < cfg.learners.size(); ++l)
    for (size_t s = 0; s < cfg.seeds.size(); ++s) tasks.push_back({l, s});

  std::vector<SeedRun> results(tasks.size());
  const int workers =
      std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(static_cast<size_t>(workers));
  auto work = [&](int w) {
    for (;;) {
      size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      try {
        results[k] = execute_seed(cfg, cfg.learners[tasks[k].learner],
                                  cfg.seeds[tasks[k].seed]);
      } catch (const std::exception& e) {
        errors[static_cast<size_t>(w)] = e.what();
        return;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw ContractError("run failed: " + e);

  // Common random numbers: every learner must have seen the same stream.
  for (size_t s = 0; s < cfg.seeds.size(); ++s) {
    std::uint64_t expected = results[s].summary.loss_stream_hash;
    for (size_t l = 1; l < cfg.learners.size(); ++l) {
      std::uint64_t got =
          results[l * cfg.seeds.size() + s].summary.loss_stream_hash;
      if (got != expected)
        throw ContractError("loss streams diverged across learners for seed " +
                            std::to_string(cfg.seeds[s]));
    }
  }

  RunReport report;
  report.header.push_back("run_id=" + cfg.run_id);
  report.header.push_back(
      std::string("mode=") +
      (cfg.mode == RunMode::Expert ? "expert" : "acquisition"));
  bool means = !results.empty() && results.front().summary.dt_from_means;
  report.header.push_back(std::string("dynamic_comparator=") +
                          (means ? "expected_means" : "realized_losses"));
  if (!cfg.option_label.empty())
    report.header.push_back("option=" + cfg.option_label);
  report.header.push_back("row_order=algo,seed,round");
  for (size_t k = 0; k < tasks.size(); ++k) {
    report.rows.insert(report.rows.end(), results[k].rows.begin(),
                       results[k].rows.end());
    report.summaries.push_back(results[k].summary);
    if (cfg.keep_raw) report.raw.push_back(std::move(results[k].raw));
  }
  return report;
}

RunReport run_active_learning(const RunConfig& cfg) {
  if (cfg.learners.size() != 1)
    throw ValidationError("run takes exactly one learner");
  return run_expert_comparison(cfg);
}

}  // namespace adaprod
