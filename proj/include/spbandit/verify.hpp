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

#ifndef SPBANDIT_VERIFY_HPP
#define SPBANDIT_VERIFY_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace spbandit {

/// Outcome of one verification claim.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the full property suite (claims 1..12). Claims that execute
/// experiment runs also write their CSV artifacts under out_dir, so two
/// invocations with the same seeds can be compared byte-for-byte.
std::vector<CriterionResult> run_verification(const std::filesystem::path& out_dir);

std::string format_criterion_line(const CriterionResult& r);

}  // namespace spbandit

#endif  // SPBANDIT_VERIFY_HPP
