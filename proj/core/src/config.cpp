#include "adaprod/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace adaprod {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ValidationError("unknown key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
T require(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key))
    throw ValidationError("missing key \"" + key + "\" in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("key \"" + key + "\" in " + where +
                          " has the wrong type");
  }
}

template <typename T>
T optional_or(const json& obj, const std::string& where, const std::string& key,
              T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("key \"" + key + "\" in " + where +
                          " has the wrong type");
  }
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw ValidationError("linspace count must be positive");
  std::vector<double> out(static_cast<size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i)
    out[static_cast<size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

std::vector<double> parse_levels(const json& obj, const std::string& where,
                                 const std::string& key) {
  if (obj.contains(key)) return require<std::vector<double>>(obj, where, key);
  std::string lin = key + "_linspace";
  if (obj.contains(lin)) {
    auto spec = require<std::vector<double>>(obj, where, lin);
    if (spec.size() != 3)
      throw ValidationError("\"" + lin + "\" must be [low, high, count]");
    return linspace(spec[0], spec[1], static_cast<int>(spec[2]));
  }
  throw ValidationError("need \"" + key + "\" or \"" + lin + "\" in " + where);
}

EnvSpec parse_env(const json& obj) {
  if (!obj.is_object()) throw ValidationError("\"env\" must be an object");
  std::string kind = require<std::string>(obj, "env", "kind");
  EnvSpec spec;
  spec.seed = optional_or<std::uint64_t>(obj, "env", "seed", 0);

  if (kind == "stationary_noisy") {
    expect_keys(obj, "env",
                {"kind", "seed", "mu", "mu_linspace", "sigma"});
    StationaryNoisyParams p;
    p.mu = parse_levels(obj, "env", "mu");
    p.sigma = optional_or<double>(obj, "env", "sigma", 0.0);
    spec.params = std::move(p);
  } else if (kind == "drifting") {
    expect_keys(obj, "env",
                {"kind", "seed", "schedule", "base", "base_linspace",
                 "amplitude", "period", "first", "second", "over", "sigma"});
    DriftingParams p;
    p.sigma = optional_or<double>(obj, "env", "sigma", 0.0);
    std::string sched = require<std::string>(obj, "env", "schedule");
    if (sched == "sinusoid") {
      DriftSinusoid s;
      s.base = parse_levels(obj, "env", "base");
      s.amplitude = optional_or<double>(obj, "env", "amplitude", 0.0);
      s.period = optional_or<double>(obj, "env", "period", 1.0);
      p.schedule = std::move(s);
    } else if (sched == "linear_swap") {
      DriftLinearSwap s;
      s.base = parse_levels(obj, "env", "base");
      s.first = require<int>(obj, "env", "first");
      s.second = require<int>(obj, "env", "second");
      s.over_rounds = require<int>(obj, "env", "over");
      p.schedule = std::move(s);
    } else {
      throw ValidationError("unknown drifting schedule \"" + sched + "\"");
    }
    spec.params = std::move(p);
  } else if (kind == "greedy_trap") {
    expect_keys(obj, "env", {"kind", "seed", "epsilon", "copies"});
    GreedyTrapParams p;
    p.epsilon = require<double>(obj, "env", "epsilon");
    p.copies = optional_or<int>(obj, "env", "copies", 1);
    spec.params = p;
  } else if (kind == "adversarial_swap") {
    expect_keys(obj, "env", {"kind", "seed", "n", "period", "low", "high"});
    AdversarialSwapParams p;
    p.n = require<int>(obj, "env", "n");
    p.period = optional_or<int>(obj, "env", "period", 1);
    p.low = optional_or<double>(obj, "env", "low", 0.0);
    p.high = optional_or<double>(obj, "env", "high", 1.0);
    spec.params = p;
  } else if (kind == "softmax_replay") {
    expect_keys(obj, "env", {"kind", "seed", "path", "transform"});
    SoftmaxReplayParams p;
    p.path = require<std::string>(obj, "env", "path");
    std::string tr =
        optional_or<std::string>(obj, "env", "transform", "uncertainty");
    if (tr == "uncertainty")
      p.transform = ReplayTransform::Uncertainty;
    else if (tr == "entropy")
      p.transform = ReplayTransform::Entropy;
    else
      throw ValidationError("unknown replay transform \"" + tr + "\"");
    spec.params = std::move(p);
  } else {
    throw ValidationError("unknown environment kind \"" + kind + "\"");
  }
  return spec;
}

LearnerSpec parse_learner(const json& obj, const std::string& where) {
  if (!obj.is_object())
    throw ValidationError(where + " must be an object");
  expect_keys(obj, where, {"algo", "rate_numerator_sq", "prior"});
  LearnerSpec spec;
  spec.algo = algo_from_name(require<std::string>(obj, where, "algo"));
  if (obj.contains("rate_numerator_sq"))
    spec.rate_numerator_sq = require<double>(obj, where, "rate_numerator_sq");
  std::string prior =
      optional_or<std::string>(obj, where, "prior", "inverse_square");
  if (prior == "inverse_square")
    spec.prior = AdaNormalHedge::Prior::InverseSquare;
  else if (prior == "uniform")
    spec.prior = AdaNormalHedge::Prior::Uniform;
  else
    throw ValidationError("unknown prior \"" + prior + "\"");
  return spec;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  expect_keys(doc, "config",
              {"run_id", "mode", "learner", "learners", "env", "T", "b",
               "n_start", "n_end", "b_schedule", "seeds", "out", "threads",
               "keep_raw", "option"});

  RunConfig cfg;
  cfg.run_id = optional_or<std::string>(doc, "config", "run_id", "run");

  if (doc.contains("learner") && doc.contains("learners"))
    throw ValidationError("give either \"learner\" or \"learners\", not both");
  if (doc.contains("learner")) {
    cfg.learners.push_back(parse_learner(doc.at("learner"), "learner"));
  } else if (doc.contains("learners")) {
    if (!doc.at("learners").is_array())
      throw ValidationError("\"learners\" must be an array");
    for (const auto& l : doc.at("learners"))
      cfg.learners.push_back(parse_learner(l, "learners[]"));
  } else {
    throw ValidationError("missing \"learner\" or \"learners\"");
  }

  if (!doc.contains("env")) throw ValidationError("missing \"env\"");
  cfg.env = parse_env(doc.at("env"));

  std::string mode = optional_or<std::string>(doc, "config", "mode", "expert");
  if (mode == "expert") {
    cfg.mode = RunMode::Expert;
    cfg.horizon = require<int>(doc, "config", "T");
    cfg.batch = optional_or<int>(doc, "config", "b", 1);
  } else if (mode == "acquisition") {
    cfg.mode = RunMode::Acquisition;
    cfg.n_start = require<int>(doc, "config", "n_start");
    cfg.n_end = require<int>(doc, "config", "n_end");
    cfg.batch = optional_or<int>(doc, "config", "b", 1);
    cfg.b_schedule = optional_or<std::vector<int>>(doc, "config", "b_schedule",
                                                   {});
  } else {
    throw ValidationError("unknown mode \"" + mode + "\"");
  }

  cfg.seeds = require<std::vector<std::uint64_t>>(doc, "config", "seeds");
  cfg.out_path = optional_or<std::string>(doc, "config", "out", "");
  cfg.threads = optional_or<int>(doc, "config", "threads", 1);
  cfg.keep_raw = optional_or<bool>(doc, "config", "keep_raw", false);
  cfg.option_label = optional_or<std::string>(doc, "config", "option", "");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace adaprod
