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

#ifndef SPBANDIT_BANDIT_CORE_HPP
#define SPBANDIT_BANDIT_CORE_HPP

#include <optional>
#include <span>
#include <vector>

#include "spbandit/common.hpp"

namespace spbandit {

/// Finite context set X and response set Y.
struct BanditSpace {
  int n_contexts = 1;
  int n_responses = 2;

  BanditSpace(int contexts, int responses);

  int cells() const { return n_contexts * n_responses; }
  bool operator==(const BanditSpace& o) const = default;
};

/// Prompt distribution rho(x) over contexts.
class ContextDistribution {
 public:
  ContextDistribution(BanditSpace space, std::vector<double> probs);
  static ContextDistribution uniform(const BanditSpace& space);

  double prob(int x) const { return probs_[x]; }
  int size() const { return static_cast<int>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Row-stochastic table pi(y|x). Rows are floored at kProbFloor and
/// renormalized, so every policy has full support. Logits are kept when the
/// table was built from them (gradient-based training needs them).
class PolicyTable {
 public:
  static PolicyTable uniform(const BanditSpace& space);
  /// Validates non-negativity and row sums (1e-9 slack), then floors and
  /// renormalizes each row exactly.
  static PolicyTable from_probs(const BanditSpace& space, std::vector<double> row_major);
  /// Row-wise max-shifted softmax of the given logits; logits are retained.
  static PolicyTable from_logits(const BanditSpace& space, std::vector<double> logits);

  const BanditSpace& space() const { return space_; }
  double prob(int x, int y) const { return probs_[x * space_.n_responses + y]; }
  std::span<const double> row(int x) const {
    return {probs_.data() + static_cast<std::size_t>(x) * space_.n_responses,
            static_cast<std::size_t>(space_.n_responses)};
  }
  const std::vector<double>& probs() const { return probs_; }

  bool has_logits() const { return logits_.has_value(); }
  const std::vector<double>& logits() const;

 private:
  PolicyTable(BanditSpace space, std::vector<double> probs,
              std::optional<std::vector<double>> logits)
      : space_(space), probs_(std::move(probs)), logits_(std::move(logits)) {}

  BanditSpace space_;
  std::vector<double> probs_;
  std::optional<std::vector<double>> logits_;
};

/// Bounded reward table r(x,y) with its box radius R_max.
struct RewardTable {
  BanditSpace space;
  std::vector<double> values;
  double r_max_bound = 0.0;

  static RewardTable zeros(const BanditSpace& space, double r_max_bound);
  /// Entrywise projection of `values` onto [-r_max_bound, r_max_bound].
  static RewardTable boxed(const BanditSpace& space, std::vector<double> values,
                           double r_max_bound);

  double operator()(int x, int y) const { return values[x * space.n_responses + y]; }
  double& at(int x, int y) { return values[x * space.n_responses + y]; }
  double max_abs() const;
};

void check_same_space(const BanditSpace& a, const BanditSpace& b, const char* what);

/// One row per context drawn from a symmetric Dirichlet(concentration).
PolicyTable random_policy(const BanditSpace& space, double concentration, Rng& rng);
PolicyTable random_policy(const BanditSpace& space, double concentration, std::uint64_t seed);

/// sum_x rho(x) sum_y pi(y|x) f(x,y), contexts outer, responses inner,
/// accumulated in extended precision.
double expected_value(const ContextDistribution& rho, const PolicyTable& pi,
                      const RewardTable& f);

/// Draw y ~ pi(.|x). Only the Monte-Carlo paths call this; exact-expectation
/// code never samples.
int sample_response(const PolicyTable& pi, int x, Rng& rng);

}  // namespace spbandit

#endif  // SPBANDIT_BANDIT_CORE_HPP
