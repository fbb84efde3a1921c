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

#ifndef SPBANDIT_EXPERIMENTS_HPP
#define SPBANDIT_EXPERIMENTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "spbandit/baselines.hpp"

namespace spbandit {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed artifact schema; the column set and order are part of the interface.
inline constexpr const char* kCsvHeader =
    "iteration,J,dual_gap,kl_expert,tv_expert,max_abs_dr,loss,grad_inf_norm";

/// Invalid configuration, carrying every violation found.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

enum class RunKind {
  kGame,
  kSpif,
  kSpin,
  kLinearSpin,
  kSppo,
  kInpo,
  kIterDpo,
  kGapRateSweep,
  kCAblation,
  kRegularizerAblation,
};

std::string run_kind_name(RunKind kind);

/// Declarative experiment description. Parsed and fully validated before any
/// run starts; every violated precondition is reported at once.
struct RunConfig {
  RunKind kind = RunKind::kGame;
  int n_contexts = 4;
  int n_responses = 8;
  double expert_concentration = 0.5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

  int iterations = 0;  // 0 picks the per-kind default
  double beta = 1.0;
  double zeta = 1.0;
  double r_max = 1.0;
  LinkFunction link = LinkFunction::kIdentity;
  RegularizerSpec::Psi psi = RegularizerSpec::Psi::kBox;
  GameConfig::Mode mode = GameConfig::Mode::kUnmapped;

  double c = 2.0;
  double alpha = 0.5;
  double spif_zeta = 1e-3;
  int inner_steps = 200;
  double lr = 0.5;
  TrainOptions::Sampling sampling = TrainOptions::Sampling::kExact;
  int sample_size = 1024;

  double eta = 1.0;  // INPO
  double tau = 0.5;  // INPO

  std::vector<int> sweep_iterations = {16, 64, 256, 1024};
  std::vector<double> sweep_c = {0.125, 0.5, 2.0};

  std::string out = "runs";

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Empty when valid.
  std::vector<std::string> validate() const;
  int effective_iterations() const;
};

/// One expert/reference/prompt-distribution triple, derived from a seed.
struct Instance {
  PolicyTable p_star;
  PolicyTable p_ref;
  ContextDistribution rho;
};

Instance make_instance(const BanditSpace& space, double expert_concentration,
                       std::uint64_t seed);

struct ArtifactRow {
  int iteration = 0;
  double j = 0.0;
  double dual_gap = 0.0;
  double kl_expert = 0.0;
  double tv_expert = 0.0;
  double max_abs_dr = 0.0;
  double loss = 0.0;
  double grad_inf_norm = 0.0;
};

/// Per-run numeric trace plus its sidecar metadata (config echo, instance
/// identity, software version, wall-clock).
struct RunArtifact {
  std::string name;
  std::vector<ArtifactRow> rows;
  nlohmann::json meta;

  std::string to_csv() const;
  void write(const std::filesystem::path& dir) const;
  static RunArtifact read(const std::filesystem::path& csv_path);
};

/// iteration 0 row is the initial state; row k holds J(pi^k, r^k), the
/// duality gap of the iterates averaged over 1..k, KL/TV of pi^{k+1} to the
/// expert, and the iteration's max |beta log(pi^{k+1}/pi^k)|.
std::vector<ArtifactRow> history_rows(const IterateHistory& h, const PolicyTable& p_star,
                                      const ContextDistribution& rho, double gap_r_max);

/// Adds per-iteration loss / gradient-norm / max|dr| summaries from training
/// step logs (grad_inf_norm and max_abs_dr are maxima over the iteration's
/// inner steps; loss is the final inner step's).
void fill_training_columns(std::vector<ArtifactRow>& rows, const std::vector<TrainStep>& steps);

/// Executes every (method x seed x sweep-point) combination, writes one CSV
/// plus one .meta.json per run and a summary.json, all under out_dir.
/// Deterministic given seeds. Returns the summary.
nlohmann::json run_experiments(const RunConfig& config, const std::filesystem::path& out_dir,
                               int threads = 1);

struct DynamicsComparison {
  std::vector<double> max_dr_ratio;      // per iteration, b/a (e.g. SPIN/SPIF)
  std::vector<double> grad_norm_ratio;   // per iteration, b/a
  double grad_range_a = 0.0;             // max/min of per-iteration grad norms, iterations >= 2
  double grad_range_b = 0.0;
  double max_abs_dr_a = 0.0;
  double max_abs_dr_b = 0.0;
  bool bounded_a = false;                // max|dr| <= 1/c + 0.05 throughout (c from a's meta)
  nlohmann::json to_json() const;
};

/// Both artifacts must come from the same instance and seed (the sidecar
/// metadata is checked); mismatches raise invalid_argument.
DynamicsComparison compare_dynamics(const std::filesystem::path& artifact_a,
                                    const std::filesystem::path& artifact_b);

}  // namespace spbandit

#endif  // SPBANDIT_EXPERIMENTS_HPP
