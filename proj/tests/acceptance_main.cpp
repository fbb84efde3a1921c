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

// Acceptance suite: executes every verification claim at its stated
// tolerance and prints one pass/fail line per claim. Claim 13 re-runs the
// artifact-producing claims with identical seeds and byte-compares the CSVs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spbandit/verify.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<fs::path> csv_files(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::exists(root)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      out.push_back(fs::relative(entry.path(), root));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out_dir = "acceptance_runs";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--out") out_dir = argv[i + 1];
  }

  const auto results = spbandit::run_verification(out_dir / "a");
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << spbandit::format_criterion_line(r) << "\n";
    all_pass = all_pass && r.pass;
  }

  // Claim 13: identical seeds must reproduce every CSV byte-for-byte, and the
  // suite above must have reported a verdict for claims 1..12.
  const auto rerun = spbandit::run_verification(out_dir / "b");
  bool deterministic = rerun.size() == results.size();
  const auto files_a = csv_files(out_dir / "a");
  const auto files_b = csv_files(out_dir / "b");
  deterministic = deterministic && files_a == files_b && !files_a.empty();
  std::size_t compared = 0;
  if (deterministic) {
    for (const auto& rel : files_a) {
      if (slurp(out_dir / "a" / rel) != slurp(out_dir / "b" / rel)) {
        deterministic = false;
        std::cout << "  mismatch: " << rel.string() << "\n";
        break;
      }
      ++compared;
    }
  }
  std::cout << (deterministic ? "PASS" : "FAIL")
            << " criterion 13 verification suite reported " << results.size()
            << " claims and reproduced " << compared << " CSV artifacts byte-for-byte\n";
  all_pass = all_pass && deterministic;

  std::cout << (all_pass ? "acceptance suite passed" : "acceptance suite has FAILING claims")
            << std::endl;
  return all_pass ? 0 : 1;
}
