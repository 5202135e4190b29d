#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaprod/batch_sampler.hpp"
#include "adaprod/config.hpp"
#include "adaprod/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitContract = 3;

void apply_overrides(adaprod::RunConfig& cfg, const std::string& out,
                     int seeds, int threads) {
  if (!out.empty()) cfg.out_path = out;
  if (seeds > 0) {
    cfg.seeds.clear();
    for (int s = 1; s <= seeds; ++s)
      cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (threads > 0) cfg.threads = threads;
}

void print_summaries(const adaprod::RunReport& report) {
  for (const std::string& line : report.header)
    std::cout << "# " << line << "\n";
  for (const adaprod::RunSummary& s : report.summaries) {
    std::printf(
        "%-14s seed=%-4llu rounds=%-6d best_fixed=%-10.4f dynamic=%-10.4f "
        "vt=%.4f dt=%.4f cap_rounds=%ld wall=%.1fms\n",
        s.algo.c_str(), static_cast<unsigned long long>(s.seed), s.rounds,
        s.final_best_fixed, s.final_dynamic, s.vt_realized, s.dt_drift,
        s.cap_active_rounds, s.wall_ms);
    if (s.invariants.total() != 0)
      std::printf("  WARNING: %llu invariant violations recorded\n",
                  static_cast<unsigned long long>(s.invariants.total()));
  }
}

int emit(const adaprod::RunConfig& cfg, const adaprod::RunReport& report) {
  if (!cfg.out_path.empty()) {
    report.write_csv(cfg.out_path);
    std::cout << "wrote " << report.rows.size() << " rows to " << cfg.out_path
              << "\n";
  } else {
    std::cout << report.csv();
  }
  print_summaries(report);
  return 0;
}

std::vector<double> parse_rho(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(std::stod(item));
  return out;
}

int run_marginals(const std::string& rho_text, long draws,
                  std::uint64_t seed) {
  std::vector<double> rho = parse_rho(rho_text);
  double total = 0.0;
  for (double v : rho) total += v;
  const int b = static_cast<int>(std::lround(total));
  adaprod::Rng rng(seed);
  std::vector<long> hits(rho.size(), 0);
  for (long d = 0; d < draws; ++d)
    for (int i : adaprod::dep_round(rho, rng)) ++hits[static_cast<size_t>(i)];
  std::printf("b=%d draws=%ld\n", b, draws);
  std::printf("%-6s %-12s %-12s %-10s\n", "index", "target", "empirical",
              "abs_dev");
  double worst = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) {
    double emp = static_cast<double>(hits[i]) / static_cast<double>(draws);
    double dev = std::abs(emp - rho[i]);
    worst = std::max(worst, dev);
    std::printf("%-6zu %-12.6f %-12.6f %-10.6f\n", i, rho[i], emp, dev);
  }
  std::printf("max_abs_dev=%.6f\n", worst);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-regret active-learning simulation harness"};
  app.require_subcommand(1);

  std::string config_path, out_path, rho_text = "0.9,0.6,0.3,0.2";
  int seeds = 0, threads = 0;
  long draws = 200000;
  std::uint64_t marginal_seed = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "JSON run configuration")
          ->required();
    cmd->add_option("--out", out_path, "CSV output path");
    cmd->add_option("--seeds", seeds, "replace the seed list with 1..K");
    cmd->add_option("--threads", threads, "worker threads");
  };

  CLI::App* run = app.add_subcommand("run", "run a single-learner config");
  add_common(run, true);
  CLI::App* compare =
      app.add_subcommand("compare", "run every configured learner on "
                         "identical loss streams");
  add_common(compare, true);
  CLI::App* validate =
      app.add_subcommand("validate", "check a config and exit");
  validate->add_option("--config", config_path, "JSON run configuration")
      ->required();
  CLI::App* marginals = app.add_subcommand(
      "marginals", "Monte-Carlo audit of the dependent-rounding marginals");
  marginals->add_option("--rho", rho_text,
                        "comma-separated inclusion probabilities");
  marginals->add_option("--draws", draws, "number of draws");
  marginals->add_option("--seed", marginal_seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (marginals->parsed()) return run_marginals(rho_text, draws, marginal_seed);

    adaprod::RunConfig cfg = adaprod::parse_config_file(config_path);
    apply_overrides(cfg, out_path, seeds, threads);
    adaprod::validate_config(cfg);

    if (validate->parsed()) {
      std::cout << "config ok\n";
      return 0;
    }
    if (run->parsed()) return emit(cfg, adaprod::run_active_learning(cfg));
    return emit(cfg, adaprod::run_expert_comparison(cfg));
  } catch (const adaprod::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const adaprod::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
