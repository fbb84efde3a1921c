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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spbandit/experiments.hpp"

using namespace spbandit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("spbandit_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation reports every violation") {
  nlohmann::json j{{"kind", "game"}, {"contexts", 0}, {"beta", -1.0}, {"lr", 0.0}};
  try {
    RunConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 3);
  }

  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"contexts", 2}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"kind", "unheard_of"}}), ConfigError);

  const RunConfig ok = RunConfig::from_json(nlohmann::json{{"kind", "spif"}, {"c", 0.5}});
  CHECK(ok.kind == RunKind::kSpif);
  CHECK(ok.c == 0.5);
  CHECK(ok.effective_iterations() == 8);
}

TEST_CASE("csv schema golden bytes") {
  RunArtifact a;
  a.name = "golden";
  a.rows.push_back(ArtifactRow{0, 0.0, 0.0, 0.5, 0.25, 0.0, 0.0, 0.0});
  a.rows.push_back(ArtifactRow{1, 1.0, 0.5, 0.25, 0.125, 2.0, 0.75, 0.0625});
  const std::string expected =
      "iteration,J,dual_gap,kl_expert,tv_expert,max_abs_dr,loss,grad_inf_norm\n"
      "0,0,0,0.5,0.25,0,0,0\n"
      "1,1,0.5,0.25,0.125,2,0.75,0.0625\n";
  CHECK(a.to_csv() == expected);
}

TEST_CASE("artifact write/read round trip") {
  const fs::path dir = temp_dir("roundtrip");
  RunArtifact a;
  a.name = "sample";
  a.rows.push_back(ArtifactRow{0, 0.0, 0.0, 0.711236625, 0.25, 0.0, 0.0, 0.0});
  a.rows.push_back(ArtifactRow{1, 0.125, 1e-17, 0.5, 0.125, 1.5, 0.25, 3.0});
  a.meta = nlohmann::json{{"instance", {{"seed", 0}}}};
  a.write(dir);
  const RunArtifact b = RunArtifact::read(dir / "sample.csv");
  REQUIRE(b.rows.size() == 2);
  CHECK(b.rows[1].dual_gap == a.rows[1].dual_gap);
  CHECK(b.rows[0].kl_expert == a.rows[0].kl_expert);
  CHECK(b.meta["instance"]["seed"] == 0);
}

TEST_CASE("runs are deterministic byte for byte") {
  RunConfig config;
  config.kind = RunKind::kGame;
  config.seeds = {0, 1};
  config.iterations = 12;
  config.n_contexts = 2;
  config.n_responses = 4;

  const fs::path dir_a = temp_dir("det_a");
  const fs::path dir_b = temp_dir("det_b");
  run_experiments(config, dir_a, 2);
  run_experiments(config, dir_b, 1);
  for (const char* name : {"game_seed0.csv", "game_seed1.csv"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    CHECK(!slurp(dir_a / name).empty());
  }
}

TEST_CASE("experiment kinds produce artifacts and summaries") {
  RunConfig config;
  config.kind = RunKind::kSpif;
  config.seeds = {0};
  config.iterations = 2;
  config.inner_steps = 40;
  config.n_contexts = 2;
  config.n_responses = 3;
  const fs::path dir = temp_dir("kinds");
  const nlohmann::json summary = run_experiments(config, dir);
  CHECK(fs::exists(dir / "spif_seed0.csv"));
  CHECK(fs::exists(dir / "spif_seed0.meta.json"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(summary["runs"].size() == 1);
  CHECK(summary["runs"][0].contains("final_tv_expert"));

  RunConfig sweep;
  sweep.kind = RunKind::kGapRateSweep;
  sweep.seeds = {0};
  sweep.sweep_iterations = {4, 8, 16};
  sweep.n_contexts = 2;
  sweep.n_responses = 3;
  const nlohmann::json sweep_summary = run_experiments(sweep, temp_dir("sweep"));
  CHECK(sweep_summary["rate_fits"].size() == 1);
  CHECK(sweep_summary["rate_fits"][0].contains("exponent"));

  RunConfig dpo;
  dpo.kind = RunKind::kIterDpo;
  dpo.seeds = {0};
  dpo.iterations = 4;
  dpo.n_contexts = 2;
  dpo.n_responses = 3;
  const nlohmann::json dpo_summary = run_experiments(dpo, temp_dir("dpo"));
  CHECK(dpo_summary["runs"].size() == 1);
}

TEST_CASE("compare_dynamics wants matching instances") {
  RunConfig spif_config;
  spif_config.kind = RunKind::kSpif;
  spif_config.seeds = {0};
  spif_config.iterations = 2;
  spif_config.inner_steps = 30;
  spif_config.n_contexts = 2;
  spif_config.n_responses = 3;
  const fs::path dir = temp_dir("cmp");
  run_experiments(spif_config, dir);

  RunConfig spin_config = spif_config;
  spin_config.kind = RunKind::kSpin;
  run_experiments(spin_config, dir);

  const DynamicsComparison cmp =
      compare_dynamics(dir / "spif_seed0.csv", dir / "spin_seed0.csv");
  CHECK(cmp.max_dr_ratio.size() == 2);
  CHECK(cmp.max_abs_dr_a > 0.0);
  CHECK(cmp.bounded_a);  // short spif run stays under 1/c + 0.05

  const DynamicsComparison self =
      compare_dynamics(dir / "spif_seed0.csv", dir / "spif_seed0.csv");
  for (double ratio : self.max_dr_ratio) CHECK(ratio == doctest::Approx(1.0));
  for (double ratio : self.grad_norm_ratio) CHECK(ratio == doctest::Approx(1.0));
  CHECK(self.grad_range_a == self.grad_range_b);

  RunConfig other = spin_config;
  other.seeds = {1};
  run_experiments(other, dir);
  CHECK_THROWS_AS(compare_dynamics(dir / "spif_seed0.csv", dir / "spin_seed1.csv"),
                  std::invalid_argument);
}
