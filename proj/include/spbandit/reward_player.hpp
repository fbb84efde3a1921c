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

#ifndef SPBANDIT_REWARD_PLAYER_HPP
#define SPBANDIT_REWARD_PLAYER_HPP

#include "spbandit/bandit_core.hpp"

namespace spbandit {

/// Link sigma applied per context to the expectation gap.
/// Identity: sigma(t) = t. Logistic: sigma(t) = -log(1 + exp(-t)).
enum class LinkFunction { kIdentity, kLogistic };

double link_value(LinkFunction link, double t);

/// Convex regularizer psi plus the proximal Bregman term zeta * D_f, with
/// D_f(r, r') = 1/2 ||r - r'||^2 in the flat geometry (the gain gradient
/// rho(x) (pi* - pi^k) lives in the same space).
struct RegularizerSpec {
  enum class Psi { kBox, kMixedQuadratic };
  Psi psi = Psi::kBox;
  double r_max = 1.0;          // Box radius
  double c = 1.0;              // MixedQuadratic
  double alpha = 0.5;          // MixedQuadratic
  double bregman_weight = 0.0; // zeta

  static RegularizerSpec box(double r_max, double zeta);
  static RegularizerSpec mixed_quadratic(double c, double alpha, double zeta);
};

/// Flat squared-distance Bregman term 1/2 ||a - b||^2.
double bregman_distance(const RewardTable& a, const RewardTable& b);

/// E_rho[sigma(E_{p*} r - E_{p_k} r)] - psi(r) - zeta D_f(r, r_prev).
/// sigma is applied per context, inside the rho-average. Box feasibility is
/// enforced (domain_error on violation).
double reward_objective(const RewardTable& r, const PolicyTable& p_star,
                        const PolicyTable& p_k, const ContextDistribution& rho,
                        LinkFunction link, const RegularizerSpec& reg,
                        const RewardTable& r_prev);

/// One projected mirror-ascent step in flat geometry:
/// clamp(r_prev + (1/zeta) rho(x) (pi*(y|x) - pi^k(y|x)), +-r_max).
/// Exact maximizer of the linear gain minus zeta/2 ||r - r_prev||^2 over the box.
RewardTable omd_reward_step(const RewardTable& r_prev, const PolicyTable& p_star,
                            const PolicyTable& p_k, const ContextDistribution& rho,
                            double zeta, double r_max);

/// Exact maximizer of the mixed quadratic objective with proximal weight zeta,
/// cellwise: r = (rho (a-b) + zeta r_prev) / (2 c rho (alpha a + (1-alpha) b) + zeta),
/// box-clamped. At zeta = 0 this is the closed-form mixed-chi2 maximizer.
RewardTable proximal_mixed_reward_step(const RewardTable& r_prev, const PolicyTable& p_star,
                                       const PolicyTable& p_k, const ContextDistribution& rho,
                                       const RegularizerSpec& reg, double r_max);

/// R_max * sign(pi* - p_bar) with sign(0) = 0: the exact box-constrained
/// best response for the reward player, achieving 2 R_max E_rho D_TV.
RewardTable sign_reward(const PolicyTable& p_star, const PolicyTable& p_bar, double r_max);

}  // namespace spbandit

#endif  // SPBANDIT_REWARD_PLAYER_HPP
