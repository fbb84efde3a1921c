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

#ifndef SPBANDIT_DIVERGENCES_HPP
#define SPBANDIT_DIVERGENCES_HPP

#include <utility>

#include "spbandit/bandit_core.hpp"

namespace spbandit {

/// Statistical distance selector. MixedChi2(alpha, c) is the regularized
/// variational quantity 2*D_chi2(p* || alpha p* + (1-alpha) p) in the
/// bounded normalization, i.e. E_rho sum_y (p*-p)^2 / (4c (alpha p* + (1-alpha) p));
/// at alpha = 1/2 this is (1/2c) E_rho sum_y (p*-p)^2/(p*+p), bounded by 1/c.
struct DivergenceKind {
  enum class Tag { kTV, kKL, kChi2, kMixedChi2 };
  Tag tag = Tag::kTV;
  double alpha = 0.5;  // MixedChi2 only
  double c = 1.0;      // MixedChi2 only

  static DivergenceKind tv() { return {Tag::kTV}; }
  static DivergenceKind kl() { return {Tag::kKL}; }
  static DivergenceKind chi2() { return {Tag::kChi2}; }
  static DivergenceKind mixed_chi2(double alpha, double c);
};

/// E_rho of the per-context divergence between p_star and p.
double divergence(const DivergenceKind& kind, const PolicyTable& p_star,
                  const PolicyTable& p, const ContextDistribution& rho);

/// Closed-form maximizer of the mixed quadratic variational problem:
/// r*(x,y) = (1/c) (p* - p)/(p* + p), zero where both densities sit at the
/// probability floor. Entries lie in [-1/c, 1/c].
RewardTable optimal_mixed_chi2_reward(const PolicyTable& p_star, const PolicyTable& p,
                                      double c);

/// E_{p*}[r] - E_p[r] - c alpha E_{p*}[r^2] - c (1-alpha) E_p[r^2],
/// all expectations under rho.
double variational_value(const RewardTable& r, const PolicyTable& p_star,
                         const PolicyTable& p, const ContextDistribution& rho, double c,
                         double alpha);

/// Independent oracle: cellwise grid scan of r over [-1/c, 1/c] maximizing
/// a (r - c/2 r^2) - b (r + c/2 r^2). Separable across cells, so the cellwise
/// scan is the global maximizer up to grid resolution.
std::pair<RewardTable, double> brute_force_variational_max(const PolicyTable& p_star,
                                                           const PolicyTable& p,
                                                           const ContextDistribution& rho,
                                                           double c, double grid_step);

}  // namespace spbandit

#endif  // SPBANDIT_DIVERGENCES_HPP
