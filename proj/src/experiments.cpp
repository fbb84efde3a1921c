// Copyright 2026 The spbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spbandit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "spbandit/divergences.hpp"

namespace spbandit {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_c_tag(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", c);
  std::string s = buf;
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::invalid_argument([&issues] {
        std::string msg = "invalid configuration:";
        for (const auto& s : issues) msg += "\n  - " + s;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string run_kind_name(RunKind kind) {
  switch (kind) {
    case RunKind::kGame: return "game";
    case RunKind::kSpif: return "spif";
    case RunKind::kSpin: return "spin";
    case RunKind::kLinearSpin: return "linear_spin";
    case RunKind::kSppo: return "sppo";
    case RunKind::kInpo: return "inpo";
    case RunKind::kIterDpo: return "iter_dpo";
    case RunKind::kGapRateSweep: return "gap_rate_sweep";
    case RunKind::kCAblation: return "c_ablation";
    case RunKind::kRegularizerAblation: return "regularizer_ablation";
  }
  return "unknown";
}

namespace {

RunKind parse_kind(const std::string& s, std::vector<std::string>& issues) {
  for (RunKind k :
       {RunKind::kGame, RunKind::kSpif, RunKind::kSpin, RunKind::kLinearSpin, RunKind::kSppo,
        RunKind::kInpo, RunKind::kIterDpo, RunKind::kGapRateSweep, RunKind::kCAblation,
        RunKind::kRegularizerAblation}) {
    if (run_kind_name(k) == s) return k;
  }
  issues.push_back("unknown experiment kind '" + s + "'");
  return RunKind::kGame;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  std::vector<std::string> issues;
  RunConfig c;
  try {
    if (!j.contains("kind")) {
      issues.push_back("missing required field 'kind'");
    } else {
      c.kind = parse_kind(j.at("kind").get<std::string>(), issues);
    }
    c.n_contexts = j.value("contexts", c.n_contexts);
    c.n_responses = j.value("responses", c.n_responses);
    c.expert_concentration = j.value("expert_concentration", c.expert_concentration);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.iterations = j.value("iterations", c.iterations);
    c.beta = j.value("beta", c.beta);
    c.zeta = j.value("zeta", c.zeta);
    c.r_max = j.value("r_max", c.r_max);
    if (j.contains("link")) {
      const std::string link = j.at("link").get<std::string>();
      if (link == "identity") {
        c.link = LinkFunction::kIdentity;
      } else if (link == "logistic") {
        c.link = LinkFunction::kLogistic;
      } else {
        issues.push_back("unknown link '" + link + "' (want identity|logistic)");
      }
    }
    if (j.contains("regularizer")) {
      const json& r = j.at("regularizer");
      const std::string psi = r.value("psi", std::string("box"));
      if (psi == "box") {
        c.psi = RegularizerSpec::Psi::kBox;
      } else if (psi == "mixed_quadratic") {
        c.psi = RegularizerSpec::Psi::kMixedQuadratic;
      } else {
        issues.push_back("unknown regularizer psi '" + psi + "' (want box|mixed_quadratic)");
      }
      c.c = r.value("c", c.c);
      c.alpha = r.value("alpha", c.alpha);
    }
    if (j.contains("mode")) {
      const std::string mode = j.at("mode").get<std::string>();
      if (mode == "unmapped") {
        c.mode = GameConfig::Mode::kUnmapped;
      } else if (mode == "mapped_delta_r") {
        c.mode = GameConfig::Mode::kMappedDeltaR;
      } else {
        issues.push_back("unknown mode '" + mode + "' (want unmapped|mapped_delta_r)");
      }
    }
    c.c = j.value("c", c.c);
    c.alpha = j.value("alpha", c.alpha);
    c.spif_zeta = j.value("spif_zeta", c.spif_zeta);
    c.inner_steps = j.value("inner_steps", c.inner_steps);
    c.lr = j.value("lr", c.lr);
    if (j.contains("sampling")) {
      const json& s = j.at("sampling");
      const std::string mode = s.value("mode", std::string("exact"));
      if (mode == "exact") {
        c.sampling = TrainOptions::Sampling::kExact;
      } else if (mode == "monte_carlo") {
        c.sampling = TrainOptions::Sampling::kMonteCarlo;
        c.sample_size = s.value("n", c.sample_size);
      } else {
        issues.push_back("unknown sampling mode '" + mode + "' (want exact|monte_carlo)");
      }
    }
    c.eta = j.value("eta", c.eta);
    c.tau = j.value("tau", c.tau);
    if (j.contains("sweep_K")) c.sweep_iterations = j.at("sweep_K").get<std::vector<int>>();
    if (j.contains("sweep_c")) c.sweep_c = j.at("sweep_c").get<std::vector<double>>();
    c.out = j.value("out", c.out);
  } catch (const json::exception& e) {
    issues.push_back(std::string("malformed config: ") + e.what());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  auto more = c.validate();
  if (!more.empty()) throw ConfigError(std::move(more));
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  j["kind"] = run_kind_name(kind);
  j["contexts"] = n_contexts;
  j["responses"] = n_responses;
  j["expert_concentration"] = expert_concentration;
  j["seeds"] = seeds;
  j["iterations"] = effective_iterations();
  j["beta"] = beta;
  j["zeta"] = zeta;
  j["r_max"] = r_max;
  j["link"] = link == LinkFunction::kIdentity ? "identity" : "logistic";
  j["regularizer"] = {
      {"psi", psi == RegularizerSpec::Psi::kBox ? "box" : "mixed_quadratic"},
      {"c", c},
      {"alpha", alpha}};
  j["mode"] = mode == GameConfig::Mode::kUnmapped ? "unmapped" : "mapped_delta_r";
  j["c"] = c;
  j["alpha"] = alpha;
  j["spif_zeta"] = spif_zeta;
  j["inner_steps"] = inner_steps;
  j["lr"] = lr;
  j["sampling"] = {{"mode", sampling == TrainOptions::Sampling::kExact ? "exact" : "monte_carlo"},
                   {"n", sample_size}};
  j["eta"] = eta;
  j["tau"] = tau;
  j["sweep_K"] = sweep_iterations;
  j["sweep_c"] = sweep_c;
  j["out"] = out;
  return j;
}

int RunConfig::effective_iterations() const {
  if (iterations > 0) return iterations;
  switch (kind) {
    case RunKind::kGame:
      return 256;
    case RunKind::kSpif:
    case RunKind::kSpin:
      return 8;
    case RunKind::kCAblation:
    case RunKind::kRegularizerAblation:
      return 3;
    case RunKind::kLinearSpin:
    case RunKind::kSppo:
    case RunKind::kInpo:
    case RunKind::kIterDpo:
      return 10;
    default:
      return 256;
  }
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> issues;
  auto check = [&issues](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  check(n_contexts >= 1, "contexts must be >= 1");
  check(n_responses >= 2, "responses must be >= 2");
  check(expert_concentration > 0.0, "expert_concentration must be positive");
  check(!seeds.empty(), "seeds must be non-empty");
  check(iterations >= 0, "iterations must be positive when given");
  check(beta > 0.0, "beta must be positive");
  check(zeta > 0.0, "zeta must be positive");
  check(r_max > 0.0, "r_max must be positive");
  check(c > 0.0, "c must be positive");
  check(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  check(spif_zeta >= 0.0, "spif_zeta must be non-negative");
  check(inner_steps > 0, "inner_steps must be positive");
  check(lr > 0.0, "lr must be positive");
  check(sample_size > 0, "sampling.n must be positive");
  if (kind == RunKind::kInpo) {
    check(eta > 0.0, "eta must be positive");
    check(tau > 0.0 && tau <= eta, "requires 0 < tau <= eta");
  }
  if (kind == RunKind::kGapRateSweep) {
    check(sweep_iterations.size() >= 3, "sweep_K needs at least 3 values");
    for (int k : sweep_iterations) check(k >= 1, "sweep_K entries must be >= 1");
  }
  if (kind == RunKind::kCAblation) {
    check(!sweep_c.empty(), "sweep_c must be non-empty");
    for (double v : sweep_c) check(v > 0.0, "sweep_c entries must be positive");
  }
  return issues;
}

Instance make_instance(const BanditSpace& space, double expert_concentration,
                       std::uint64_t seed) {
  return Instance{random_policy(space, expert_concentration, seed),
                  PolicyTable::uniform(space), ContextDistribution::uniform(space)};
}

std::string RunArtifact::to_csv() const {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ArtifactRow& r : rows) {
    out += std::to_string(r.iteration);
    for (double v : {r.j, r.dual_gap, r.kl_expert, r.tv_expert, r.max_abs_dr, r.loss,
                     r.grad_inf_norm}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void RunArtifact::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / (name + ".csv"), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / (name + ".csv")).string());
    f << to_csv();
  }
  {
    std::ofstream f(dir / (name + ".meta.json"));
    if (!f) throw std::runtime_error("cannot write " + (dir / (name + ".meta.json")).string());
    f << meta.dump(2) << '\n';
  }
}

RunArtifact RunArtifact::read(const std::filesystem::path& csv_path) {
  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("cannot read " + csv_path.string());
  RunArtifact a;
  a.name = csv_path.stem().string();
  std::string line;
  if (!std::getline(f, line) || line != kCsvHeader) {
    throw std::runtime_error("unexpected CSV header in " + csv_path.string());
  }
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    ArtifactRow r;
    std::istringstream ss(line);
    std::string cell;
    double* fields[7] = {&r.j, &r.dual_gap, &r.kl_expert, &r.tv_expert, &r.max_abs_dr,
                         &r.loss, &r.grad_inf_norm};
    std::getline(ss, cell, ',');
    r.iteration = std::stoi(cell);
    for (double* fp : fields) {
      std::getline(ss, cell, ',');
      *fp = std::stod(cell);
    }
    a.rows.push_back(r);
  }
  std::filesystem::path meta_path = csv_path;
  meta_path.replace_extension();
  meta_path += ".meta.json";
  if (std::filesystem::exists(meta_path)) {
    std::ifstream m(meta_path);
    m >> a.meta;
  }
  return a;
}

std::vector<ArtifactRow> history_rows(const IterateHistory& h, const PolicyTable& p_star,
                                      const ContextDistribution& rho, double gap_r_max) {
  const BanditSpace& space = p_star.space();
  const int K = static_cast<int>(h.rewards.size());
  std::vector<ArtifactRow> rows;
  rows.reserve(K + 1);
  rows.push_back(ArtifactRow{0, 0.0, 0.0, h.kl_to_expert.front(),
                             expected_tv(rho, h.policies.front(), p_star), 0.0, 0.0, 0.0});

  // Prefix sums give the Def.-1 gap of the averages over 1..k at each k.
  std::vector<double> policy_sum(space.cells(), 0.0);
  std::vector<double> reward_sum(space.cells(), 0.0);
  for (int k = 1; k <= K; ++k) {
    const auto& pk = h.policies[k - 1].probs();
    for (int i = 0; i < space.cells(); ++i) {
      policy_sum[i] += pk[i];
      reward_sum[i] += h.rewards[k - 1].values[i];
    }
    std::vector<double> avg_p(space.cells());
    std::vector<double> avg_r(space.cells());
    for (int i = 0; i < space.cells(); ++i) {
      avg_p[i] = policy_sum[i] / k;
      avg_r[i] = reward_sum[i] / k;
    }
    PolicyTable pbar = PolicyTable::from_probs(space, std::move(avg_p));
    RewardTable rbar{space, std::move(avg_r), gap_r_max};  // true average, unclamped
    const double max_term =
        game_value(pbar, sign_reward(p_star, pbar, gap_r_max), p_star, rho);
    long double min_term = 0.0L;
    for (int x = 0; x < space.n_contexts; ++x) {
      long double expert = 0.0L;
      double best = rbar(x, 0);
      for (int y = 0; y < space.n_responses; ++y) {
        expert += p_star.prob(x, y) * rbar(x, y);
        best = std::max(best, rbar(x, y));
      }
      min_term += static_cast<long double>(rho.prob(x)) * (expert - best);
    }

    const RewardTable dr = reward_mapping(h.policies[k], h.policies[k - 1], h.config.beta);
    rows.push_back(ArtifactRow{k, h.game_values[k - 1],
                               max_term - static_cast<double>(min_term), h.kl_to_expert[k],
                               expected_tv(rho, h.policies[k], p_star), dr.max_abs(), 0.0,
                               0.0});
  }
  return rows;
}

void fill_training_columns(std::vector<ArtifactRow>& rows,
                           const std::vector<TrainStep>& steps) {
  for (const TrainStep& s : steps) {
    if (s.iteration <= 0 || s.iteration >= static_cast<int>(rows.size())) continue;
    ArtifactRow& r = rows[s.iteration];
    r.loss = s.loss;  // last inner step wins
    r.grad_inf_norm = std::max(r.grad_inf_norm, s.grad_inf_norm);
    r.max_abs_dr = std::max(r.max_abs_dr, s.max_abs_dr);
  }
}

namespace {

json instance_meta(const RunConfig& config, std::uint64_t seed) {
  return json{{"contexts", config.n_contexts},
              {"responses", config.n_responses},
              {"expert_concentration", config.expert_concentration},
              {"seed", seed}};
}

RunArtifact make_artifact(std::string name, std::vector<ArtifactRow> rows,
                          const RunConfig& config, std::uint64_t seed, const json& extra,
                          double wall_seconds) {
  RunArtifact a;
  a.name = std::move(name);
  a.rows = std::move(rows);
  a.meta = json{{"config", config.to_json()},
                {"instance", instance_meta(config, seed)},
                {"version", kVersion},
                {"wall_clock_seconds", wall_seconds}};
  for (auto it = extra.begin(); it != extra.end(); ++it) a.meta[it.key()] = it.value();
  return a;
}

GameConfig game_config_of(const RunConfig& c, int iterations) {
  GameConfig g;
  g.iterations = iterations;
  g.beta = c.beta;
  g.zeta = c.zeta;
  g.r_max = c.r_max;
  g.link = c.link;
  g.regularizer = c.psi == RegularizerSpec::Psi::kBox
                      ? RegularizerSpec::box(c.r_max, c.zeta)
                      : RegularizerSpec::mixed_quadratic(c.c, c.alpha, c.zeta);
  g.mode = c.mode;
  return g;
}

// History assembled from a sequence of closed-form policy updates; rewards
// are the realized mapped rewards so the artifact columns stay uniform.
IterateHistory history_from_policy_seq(std::vector<PolicyTable> policies, double beta,
                                       const PolicyTable& p_star,
                                       const ContextDistribution& rho) {
  IterateHistory h;
  h.config.iterations = static_cast<int>(policies.size()) - 1;
  h.config.beta = beta;
  h.config.r_max = 1.0;
  for (std::size_t k = 0; k + 1 < policies.size(); ++k) {
    RewardTable dr = reward_mapping(policies[k + 1], policies[k], beta);
    h.game_values.push_back(game_value(policies[k], dr, p_star, rho));
    h.rewards.push_back(std::move(dr));
  }
  for (const auto& p : policies) h.kl_to_expert.push_back(expected_kl(rho, p_star, p));
  h.policies = std::move(policies);
  return h;
}

struct RunJob {
  std::string name;
  std::function<RunArtifact()> work;
};

}  // namespace

json run_experiments(const RunConfig& config, const std::filesystem::path& out_dir,
                     int threads) {
  auto issues = config.validate();
  if (!issues.empty()) throw ConfigError(std::move(issues));
  std::filesystem::create_directories(out_dir);

  const BanditSpace space(config.n_contexts, config.n_responses);
  const int K = config.effective_iterations();
  std::vector<RunJob> jobs;

  auto timed = [&config](std::string name, std::uint64_t seed, json extra,
                         std::function<std::vector<ArtifactRow>(json&)> body) {
    return [name = std::move(name), seed, extra = std::move(extra), body = std::move(body),
            &config]() mutable {
      const auto start = std::chrono::steady_clock::now();
      std::vector<ArtifactRow> rows = body(extra);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return make_artifact(name, std::move(rows), config, seed, extra, secs);
    };
  };

  auto spif_rows = [&](std::uint64_t seed, double c_value, double zeta_value, int iters,
                       json& extra) {
    Instance inst = make_instance(space, config.expert_concentration, seed);
    SpifLossSpec spec = SpifLossSpec::make(config.beta, c_value, config.alpha, zeta_value);
    TrainOptions opts;
    opts.inner_steps = config.inner_steps;
    opts.lr = config.lr;
    opts.sampling = config.sampling;
    opts.sample_size = config.sample_size;
    opts.seed = seed;
    TrainResult result = spif_train(spec, iters, inst.p_star, inst.p_ref, inst.rho, opts);
    std::vector<ArtifactRow> rows =
        history_rows(result.history, inst.p_star, inst.rho, 1.0 / c_value);
    fill_training_columns(rows, result.steps);
    extra["final_tv_expert"] = rows.back().tv_expert;
    extra["final_kl_expert"] = rows.back().kl_expert;
    return rows;
  };

  switch (config.kind) {
    case RunKind::kGame: {
      for (std::uint64_t seed : config.seeds) {
        jobs.push_back({"", timed("game_seed" + std::to_string(seed), seed, {},
                                  [&, seed](json& extra) {
                                    Instance inst = make_instance(
                                        space, config.expert_concentration, seed);
                                    IterateHistory h = run_selfplay(
                                        game_config_of(config, K), inst.p_star, inst.p_ref,
                                        inst.rho);
                                    auto rows =
                                        history_rows(h, inst.p_star, inst.rho, config.r_max);
                                    extra["final_dual_gap"] = rows.back().dual_gap;
                                    extra["final_kl_expert"] = rows.back().kl_expert;
                                    return rows;
                                  })});
      }
      break;
    }
    case RunKind::kSpif: {
      for (std::uint64_t seed : config.seeds) {
        jobs.push_back({"", timed("spif_seed" + std::to_string(seed), seed, {},
                                  [&, seed](json& extra) {
                                    return spif_rows(seed, config.c, config.spif_zeta, K,
                                                     extra);
                                  })});
      }
      break;
    }
    case RunKind::kSpin: {
      for (std::uint64_t seed : config.seeds) {
        jobs.push_back({"", timed("spin_seed" + std::to_string(seed), seed, {},
                                  [&, seed](json& extra) {
                                    Instance inst = make_instance(
                                        space, config.expert_concentration, seed);
                                    TrainOptions opts;
                                    opts.inner_steps = config.inner_steps;
                                    opts.lr = config.lr;
                                    TrainResult result = spin_train(
                                        config.beta, K, inst.p_star, inst.p_ref, inst.rho,
                                        opts);
                                    auto rows = history_rows(result.history, inst.p_star,
                                                             inst.rho, config.r_max);
                                    fill_training_columns(rows, result.steps);
                                    extra["final_tv_expert"] = rows.back().tv_expert;
                                    return rows;
                                  })});
      }
      break;
    }
    case RunKind::kLinearSpin: {
      for (std::uint64_t seed : config.seeds) {
        jobs.push_back(
            {"", timed("linear_spin_seed" + std::to_string(seed), seed, {},
                       [&, seed](json& extra) {
                         Instance inst =
                             make_instance(space, config.expert_concentration, seed);
                         std::vector<PolicyTable> policies{inst.p_ref};
                         for (int k = 0; k < K; ++k) {
                           policies.push_back(linear_spin_update(
                               policies.back(), inst.p_star, inst.rho, config.beta,
                               config.r_max));
                         }
                         IterateHistory h = history_from_policy_seq(
                             std::move(policies), config.beta, inst.p_star, inst.rho);
                         auto rows = history_rows(h, inst.p_star, inst.rho, config.r_max);
                         extra["final_tv_expert"] = rows.back().tv_expert;
                         return rows;
                       })});
      }
      break;
    }
    case RunKind::kSppo:
    case RunKind::kInpo:
    case RunKind::kIterDpo: {
      for (std::uint64_t seed : config.seeds) {
        const std::string name = run_kind_name(config.kind) + "_seed" + std::to_string(seed);
        jobs.push_back(
            {"", timed(name, seed, {}, [&, seed](json& extra) {
               Instance inst = make_instance(space, config.expert_concentration, seed);
               // Latent Bradley-Terry reward drawn from the seed; the induced
               // softmax policy is the imitation target for the trace columns.
               Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
               std::vector<double> latent(space.cells());
               for (double& v : latent) v = rng.normal();
               RewardTable rstar{space, latent, 10.0};
               PreferenceOracle oracle = PreferenceOracle::bradley_terry(rstar);
               std::vector<double> logits = latent;
               PolicyTable target = PolicyTable::from_logits(space, std::move(logits));

               std::vector<PolicyTable> policies{inst.p_ref};
               for (int k = 0; k < K; ++k) {
                 const PolicyTable& p_k = policies.back();
                 if (config.kind == RunKind::kSppo) {
                   policies.push_back(sppo_step(p_k, oracle, inst.rho, config.beta,
                                                config.inner_steps, config.lr));
                 } else if (config.kind == RunKind::kInpo) {
                   policies.push_back(inpo_step(
                       p_k, oracle, inst.rho,
                       InpoConfig::make(config.eta, config.tau, inst.p_ref),
                       config.inner_steps, config.lr));
                 } else {
                   policies.push_back(iterative_dpo_step(p_k, oracle, config.beta));
                 }
               }
               IterateHistory h = history_from_policy_seq(std::move(policies), config.beta,
                                                          target, inst.rho);
               auto rows = history_rows(h, target, inst.rho, config.r_max);
               extra["final_tv_latent_policy"] = rows.back().tv_expert;
               return rows;
             })});
      }
      break;
    }
    case RunKind::kGapRateSweep: {
      for (std::uint64_t seed : config.seeds) {
        for (int sweep_k : config.sweep_iterations) {
          const std::string name =
              "game_K" + std::to_string(sweep_k) + "_seed" + std::to_string(seed);
          jobs.push_back(
              {"", timed(name, seed, json{{"sweep_K", sweep_k}}, [&, seed, sweep_k](json& extra) {
                 Instance inst = make_instance(space, config.expert_concentration, seed);
                 // Theorem-1 schedule from run-measured proxies: D from the
                 // initial KL to the expert, B from the box diameter.
                 const double d_hat = expected_kl(inst.rho, inst.p_star, inst.p_ref);
                 const double b_hat = 2.0 * space.n_contexts * space.n_responses;
                 GameConfig g = game_config_of(config, sweep_k);
                 g.beta = std::sqrt(static_cast<double>(sweep_k)) / d_hat;
                 g.zeta = std::sqrt(static_cast<double>(sweep_k)) /
                          (b_hat * config.r_max * config.r_max);
                 IterateHistory h = run_selfplay(g, inst.p_star, inst.p_ref, inst.rho);
                 auto rows = history_rows(h, inst.p_star, inst.rho, config.r_max);
                 extra["schedule"] = json{{"beta", g.beta}, {"zeta", g.zeta},
                                          {"d_hat", d_hat}, {"b_hat", b_hat}};
                 extra["final_dual_gap"] = rows.back().dual_gap;
                 return rows;
               })});
        }
      }
      break;
    }
    case RunKind::kCAblation: {
      for (std::uint64_t seed : config.seeds) {
        for (double c_value : config.sweep_c) {
          const std::string name =
              "spif_c" + format_c_tag(c_value) + "_seed" + std::to_string(seed);
          jobs.push_back({"", timed(name, seed, json{{"sweep_c", c_value}},
                                    [&, seed, c_value](json& extra) {
                                      return spif_rows(seed, c_value, config.spif_zeta, K,
                                                       extra);
                                    })});
        }
      }
      break;
    }
    case RunKind::kRegularizerAblation: {
      for (std::uint64_t seed : config.seeds) {
        for (bool with_reg : {true, false}) {
          const std::string name = std::string("spif_reg_") + (with_reg ? "on" : "off") +
                                   "_seed" + std::to_string(seed);
          jobs.push_back({"", timed(name, seed, json{{"regularizer_enabled", with_reg}},
                                    [&, seed, with_reg](json& extra) {
                                      return spif_rows(seed,
                                                       config.c,
                                                       with_reg ? config.spif_zeta : 0.0, K,
                                                       extra);
                                    })});
        }
      }
      break;
    }
  }

  // Independent runs; each writes its own files.
  std::vector<RunArtifact> artifacts(jobs.size(), RunArtifact{});
  const int n_threads = std::max(1, threads);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || failed.load()) break;
      try {
        artifacts[i] = jobs[i].work();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(first_error);

  json summary;
  summary["config"] = config.to_json();
  summary["version"] = kVersion;
  json runs = json::array();
  for (const RunArtifact& a : artifacts) {
    a.write(out_dir);
    json r{{"name", a.name}};
    for (const char* key : {"final_dual_gap", "final_tv_expert", "final_kl_expert",
                            "final_tv_latent_policy", "sweep_K", "sweep_c",
                            "regularizer_enabled", "schedule"}) {
      if (a.meta.contains(key)) r[key] = a.meta[key];
    }
    r["seed"] = a.meta["instance"]["seed"];
    runs.push_back(std::move(r));
  }
  summary["runs"] = std::move(runs);

  if (config.kind == RunKind::kGapRateSweep) {
    json fits = json::array();
    for (std::uint64_t seed : config.seeds) {
      std::vector<std::pair<int, double>> gaps;
      bool nonneg = true;
      for (const RunArtifact& a : artifacts) {
        if (a.meta["instance"]["seed"].get<std::uint64_t>() != seed) continue;
        const double gap = a.rows.back().dual_gap;
        gaps.emplace_back(a.meta["sweep_K"].get<int>(), gap);
        nonneg = nonneg && gap >= -1e-9;
      }
      json fit{{"seed", seed}, {"gap_nonnegative", nonneg}};
      try {
        auto [exponent, constant] = rate_fit(gaps);
        fit["exponent"] = exponent;
        fit["constant"] = constant;
      } catch (const std::domain_error&) {
        fit["exponent"] = nullptr;
        fit["converged_below_tolerance"] = true;
      }
      fits.push_back(std::move(fit));
    }
    summary["rate_fits"] = std::move(fits);
  }

  if (config.kind == RunKind::kCAblation) {
    json per_c = json::array();
    for (double c_value : config.sweep_c) {
      std::vector<double> tvs;
      for (const RunArtifact& a : artifacts) {
        if (a.meta.contains("sweep_c") && a.meta["sweep_c"].get<double>() == c_value) {
          tvs.push_back(a.rows.back().tv_expert);
        }
      }
      per_c.push_back(json{{"c", c_value}, {"final_tv_expert", tvs},
                           {"median_final_tv_expert", median(tvs)}});
    }
    summary["c_ablation"] = std::move(per_c);
  }

  {
    std::ofstream f(out_dir / "summary.json");
    if (!f) throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
    f << summary.dump(2) << '\n';
  }
  return summary;
}

json DynamicsComparison::to_json() const {
  return json{{"max_dr_ratio", max_dr_ratio},
              {"grad_norm_ratio", grad_norm_ratio},
              {"grad_range_a", grad_range_a},
              {"grad_range_b", grad_range_b},
              {"max_abs_dr_a", max_abs_dr_a},
              {"max_abs_dr_b", max_abs_dr_b},
              {"bounded_a", bounded_a}};
}

DynamicsComparison compare_dynamics(const std::filesystem::path& artifact_a,
                                    const std::filesystem::path& artifact_b) {
  RunArtifact a = RunArtifact::read(artifact_a);
  RunArtifact b = RunArtifact::read(artifact_b);
  if (a.meta.is_null() || b.meta.is_null() || !a.meta.contains("instance") ||
      !b.meta.contains("instance") || a.meta["instance"] != b.meta["instance"]) {
    throw std::invalid_argument("compare_dynamics: artifacts come from different instances");
  }
  if (a.rows.size() != b.rows.size()) {
    throw std::invalid_argument("compare_dynamics: artifacts have different lengths");
  }

  DynamicsComparison cmp;
  auto range_after_warmup = [](const RunArtifact& art) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const ArtifactRow& r : art.rows) {
      if (r.iteration < 2 || r.grad_inf_norm <= 0.0) continue;  // warm-up: iteration 1
      lo = std::min(lo, r.grad_inf_norm);
      hi = std::max(hi, r.grad_inf_norm);
    }
    return lo < hi ? hi / lo : 1.0;
  };
  for (std::size_t i = 1; i < a.rows.size(); ++i) {
    const double dr_a = a.rows[i].max_abs_dr;
    const double dr_b = b.rows[i].max_abs_dr;
    cmp.max_dr_ratio.push_back(dr_a > 0.0 ? dr_b / dr_a : 0.0);
    const double ga = a.rows[i].grad_inf_norm;
    const double gb = b.rows[i].grad_inf_norm;
    cmp.grad_norm_ratio.push_back(ga > 0.0 ? gb / ga : 0.0);
    cmp.max_abs_dr_a = std::max(cmp.max_abs_dr_a, dr_a);
    cmp.max_abs_dr_b = std::max(cmp.max_abs_dr_b, dr_b);
  }
  cmp.grad_range_a = range_after_warmup(a);
  cmp.grad_range_b = range_after_warmup(b);
  const double c_value = a.meta["config"]["c"].get<double>();
  cmp.bounded_a = cmp.max_abs_dr_a <= 1.0 / c_value + 0.05;
  return cmp;
}

}  // namespace spbandit
