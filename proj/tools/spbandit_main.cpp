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

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spbandit/experiments.hpp"
#include "spbandit/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular self-play imitation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  int threads = 1;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute a batch experiment config");
  run_cmd->add_option("config", config_path, "JSON config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides config)");
  run_cmd->add_option("--seeds", seeds, "Seed list (overrides config)")->delimiter(',');
  run_cmd->add_option("--threads", threads, "Concurrent runs");

  std::string artifact_a, artifact_b;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Compare two run artifacts (e.g. SPIF vs SPIN)");
  compare_cmd->add_option("artifact_a", artifact_a, "First artifact CSV")->required();
  compare_cmd->add_option("artifact_b", artifact_b, "Second artifact CSV")->required();

  std::string verify_out = "verify_runs";
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the full property suite and print pass/fail per claim");
  verify_cmd->add_option("--out", verify_out, "Directory for the suite's CSV artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run_cmd) {
      spbandit::RunConfig config = spbandit::RunConfig::from_file(config_path);
      if (!seeds.empty()) config.seeds = seeds;
      const std::string dir = out_dir.empty() ? config.out : out_dir;
      const nlohmann::json summary = spbandit::run_experiments(config, dir, threads);
      std::cout << summary.dump(2) << std::endl;
      return kExitOk;
    }
    if (*compare_cmd) {
      const spbandit::DynamicsComparison cmp =
          spbandit::compare_dynamics(artifact_a, artifact_b);
      std::cout << cmp.to_json().dump(2) << std::endl;
      return kExitOk;
    }
    if (*verify_cmd) {
      const auto results = spbandit::run_verification(verify_out);
      bool all_pass = true;
      for (const auto& r : results) {
        std::cout << spbandit::format_criterion_line(r) << "\n";
        all_pass = all_pass && r.pass;
      }
      std::cout << (all_pass ? "all claims passed" : "some claims FAILED") << std::endl;
      return all_pass ? kExitOk : kExitRuntime;
    }
  } catch (const spbandit::ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitRuntime;
  }
  return kExitValidation;
}
