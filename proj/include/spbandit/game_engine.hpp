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

#ifndef SPBANDIT_GAME_ENGINE_HPP
#define SPBANDIT_GAME_ENGINE_HPP

#include <utility>
#include <vector>

#include "spbandit/policy_player.hpp"
#include "spbandit/reward_player.hpp"

namespace spbandit {

/// Two-stage self-play loop configuration. K iterations, policy temperature
/// beta, reward proximal weight zeta, box radius R_max. In MappedDeltaR mode
/// each reward is replaced by its partition-free mapping before the policy
/// step (the policy sequence is invariant to that per-context shift).
struct GameConfig {
  enum class Mode { kUnmapped, kMappedDeltaR };

  int iterations = 1;
  double beta = 1.0;
  double zeta = 1.0;
  double r_max = 1.0;
  LinkFunction link = LinkFunction::kIdentity;
  RegularizerSpec regularizer = RegularizerSpec::box(1.0, 1.0);
  Mode mode = Mode::kUnmapped;

  void validate() const;
};

/// Logged iterates of one run: K+1 policies (pi^1..pi^{K+1}), K rewards,
/// K game values J(pi^k, r^k), K+1 KLs to the expert.
struct IterateHistory {
  GameConfig config;
  std::vector<PolicyTable> policies;
  std::vector<RewardTable> rewards;
  std::vector<double> game_values;
  std::vector<double> kl_to_expert;
};

/// Averaged-iterate duality gap and the constants measured along the run.
/// d_const = max over the run of E_rho KL(pi*||pi^k). b_const is the flat
/// Bregman proxy max_k D_f(r*_k, r^k)/R_max^2 with r*_k the closed-form
/// mixed-chi2 maximizer at iterate k; available only under the
/// MixedQuadratic regularizer. bound_value = (D + B) R_max^2 / sqrt(K) using
/// b_const when available, else the box-diameter bound 2 |X||Y|.
struct DualityGapReport {
  double gap = 0.0;
  PolicyTable avg_policy;
  RewardTable avg_reward;
  double d_const = 0.0;
  double b_const = 0.0;
  bool b_available = false;
  double bound_value = 0.0;
};

/// J(pi, r) = E_rho[E_{pi*} r - E_pi r].
double game_value(const PolicyTable& pi, const RewardTable& r, const PolicyTable& p_star,
                  const ContextDistribution& rho);

/// Algorithm loop: pi^1 = p_ref, r^0 = 0; for k = 1..K obtain r^k from the
/// regularized reward step (OMD under Box, closed-form/proximal maximizer
/// under MixedQuadratic), then pi^{k+1} = kl_regularized_update(pi^k, r^k, beta).
IterateHistory run_selfplay(const GameConfig& config, const PolicyTable& p_star,
                            const PolicyTable& p_ref, const ContextDistribution& rho);

/// Exact duality gap on uniform averages of iterates 1..K: the reward
/// extreme is the sign reward, the policy extreme puts all mass on
/// argmax_y rbar(x, y) (lowest index wins ties).
DualityGapReport duality_gap(const IterateHistory& history, const PolicyTable& p_star,
                             const ContextDistribution& rho, double r_max);

/// Least-squares fit of log gap = log constant - exponent * log K.
/// Requires >= 3 distinct K values and positive gaps (domain_error otherwise).
std::pair<double, double> rate_fit(const std::vector<std::pair<int, double>>& gaps);

}  // namespace spbandit

#endif  // SPBANDIT_GAME_ENGINE_HPP
