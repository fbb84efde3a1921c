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

#ifndef SPBANDIT_POLICY_PLAYER_HPP
#define SPBANDIT_POLICY_PLAYER_HPP

#include <utility>
#include <vector>

#include "spbandit/bandit_core.hpp"

namespace spbandit {

// The KL-regularized policy player. The temperature beta corresponds to the
// mirror-descent step 1/beta (eta = 1/beta throughout).

/// Closed-form KL-regularized update: row x of the output is
/// normalize(pi^k(.|x) * exp(r(x,.)/beta)), computed with per-row
/// max-subtraction. Throws NumericalError if a row underflows entirely.
PolicyTable kl_regularized_update(const PolicyTable& p_k, const RewardTable& r, double beta);

/// log sum_y pi^k(y|x) exp(r(x,y)/beta), per context, max-shifted.
std::vector<double> log_partition(const PolicyTable& p_k, const RewardTable& r, double beta);

/// Partition-free reward reparameterization:
/// Delta r(x,y) = beta (log pi(y|x) - log pi^k(y|x)). The returned table's
/// r_max_bound is the realized max absolute entry.
RewardTable reward_mapping(const PolicyTable& pi, const PolicyTable& p_k, double beta);

/// Both sides of the one-step mirror-descent inequality, rho-averaged, with
/// eta = 1/beta and pi' = kl_regularized_update(p, r, beta):
///   lhs = E_rho <r(x,.), pi* - pi>
///   rhs = eta R_max^2 / 2 + (1/eta) E_rho [KL(pi*||pi) - KL(pi*||pi')].
/// Callers assert lhs <= rhs.
std::pair<double, double> one_step_descent_check(const PolicyTable& p_star,
                                                 const PolicyTable& p, const RewardTable& r,
                                                 double beta, const ContextDistribution& rho);

/// E_rho D_KL(p||q).
double expected_kl(const ContextDistribution& rho, const PolicyTable& p, const PolicyTable& q);

/// D_KL(p(.|x) || q(.|x)) for a single context.
double kl_row(const PolicyTable& p, const PolicyTable& q, int x);

/// E_rho D_TV(p, q).
double expected_tv(const ContextDistribution& rho, const PolicyTable& p, const PolicyTable& q);

}  // namespace spbandit

#endif  // SPBANDIT_POLICY_PLAYER_HPP
