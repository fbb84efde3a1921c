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

#ifndef SPBANDIT_BASELINES_HPP
#define SPBANDIT_BASELINES_HPP

#include <optional>
#include <tuple>
#include <vector>

#include "spbandit/spif.hpp"

namespace spbandit {

/// Pairwise preference oracle P(y1 > y2 | x): Bradley-Terry (driven by a
/// latent reward) or a general antisymmetric table.
class PreferenceOracle {
 public:
  enum class Kind { kBradleyTerry, kGeneral };

  static PreferenceOracle bradley_terry(RewardTable latent_reward);
  /// probs is X * Y * Y row-major with P(y,y') + P(y',y) = 1 (1e-12 slack).
  static PreferenceOracle general(const BanditSpace& space, std::vector<double> probs);

  Kind kind() const { return kind_; }
  const BanditSpace& space() const { return space_; }
  const RewardTable& latent_reward() const;
  double prob(int x, int y1, int y2) const;

 private:
  PreferenceOracle(Kind kind, BanditSpace space) : kind_(kind), space_(space) {}

  Kind kind_;
  BanditSpace space_;
  std::optional<RewardTable> latent_;
  std::vector<double> table_;
};

/// w^k(x,y) = E_{y' ~ p_k(.|x)} P(y > y' | x), exact enumeration (X*Y table).
std::vector<double> win_rates(const PreferenceOracle& oracle, const PolicyTable& p_k);

// -- SPIN ---------------------------------------------------------------------

/// Negated self-play objective, exact expectation over (x,y) ~ rho x pi*,
/// y' ~ pi^k: E[log(1 + exp(-(dr(y) - dr(y'))))] with dr = beta log(pi/pi^k).
double spin_logistic_loss(const PolicyTable& pi, const PolicyTable& p_k,
                          const PolicyTable& p_star, const ContextDistribution& rho,
                          double beta);

std::vector<double> spin_logistic_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                           const PolicyTable& p_star,
                                           const ContextDistribution& rho, double beta);

/// Geometric-mixture row update pi^{k+1} proportional to pi^k (pi*/pi^k)^{1/beta}.
/// beta < 1 is accepted but outside the contraction regime.
PolicyTable spin_exact_update(const PolicyTable& p_k, const PolicyTable& p_star, double beta);

/// One sign-reward best response followed by the KL-regularized tilt: the
/// TV-driven instance of the game.
PolicyTable linear_spin_update(const PolicyTable& p_k, const PolicyTable& p_star,
                               const ContextDistribution& rho, double beta, double r_max);

/// Gradient-descent SPIN path (dynamics comparisons against spif_train).
TrainResult spin_train(double beta, int iterations, const PolicyTable& p_star,
                       const PolicyTable& p_ref, const ContextDistribution& rho,
                       const TrainOptions& opts);

/// Per-iteration (k, KL(pi*||pi^{k+1}), (1 - 1/beta) KL(pi*||pi^k)) for a
/// policy sequence from iterated spin_exact_update; KLs averaged uniformly
/// over contexts. Callers assert lhs <= rhs.
std::vector<std::tuple<int, double, double>> contraction_check_spin(
    const std::vector<PolicyTable>& history, const PolicyTable& p_star, double beta);

// -- SPPO ---------------------------------------------------------------------

/// E_{rho, y ~ pi^k}[ log(pi/pi^k) - (1/beta)(w^k(x,y) - 1/2) ]^2.
double sppo_loss(const PolicyTable& pi, const PolicyTable& p_k, const PreferenceOracle& oracle,
                 const ContextDistribution& rho, double beta);

std::vector<double> sppo_loss_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                       const PreferenceOracle& oracle,
                                       const ContextDistribution& rho, double beta);

/// The chi^2-regularized adversarial objective at the mapped reward
/// dr = beta log(pi/pi^k) under the preference-weighted measures:
/// E_{rho, y ~ pi^k}[(2 w^k - 1) dr - c dr^2]. Its logit gradient is exactly
/// -c beta^2 times the sppo_loss gradient.
double sppo_ail_objective(const PolicyTable& pi, const PolicyTable& p_k,
                          const PreferenceOracle& oracle, const ContextDistribution& rho,
                          double beta, double c);

std::vector<double> sppo_ail_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                      const PreferenceOracle& oracle,
                                      const ContextDistribution& rho, double beta, double c);

PolicyTable sppo_step(const PolicyTable& p_k, const PreferenceOracle& oracle,
                      const ContextDistribution& rho, double beta, int inner_steps, double lr);

// -- INPO ---------------------------------------------------------------------

struct InpoConfig {
  double eta = 1.0;
  double tau = 0.5;
  PolicyTable p_ref;

  static InpoConfig make(double eta, double tau, PolicyTable p_ref);
};

/// Paired least-squares residual form:
/// E_{rho, (y,y') ~ pi^k x pi^k}[ h^k(pi,x,y,y') - (w^k(y) - w^k(y'))/eta ]^2
/// with h^k = log(pi(y)/pi(y')) - (tau/eta) log(pref ratio)
///          - ((eta-tau)/eta) log(pi^k ratio).
double inpo_paired_loss(const PolicyTable& pi, const PolicyTable& p_k,
                        const PreferenceOracle& oracle, const ContextDistribution& rho,
                        const InpoConfig& config);

std::vector<double> inpo_paired_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                         const PreferenceOracle& oracle,
                                         const ContextDistribution& rho,
                                         const InpoConfig& config);

/// Winner/loser form: (y_w, y_l) is (y, y') with probability P(y > y' | x)
/// and (y', y) otherwise, and the residual carries the 1/(2 eta) constant.
/// Equals the paired form up to an additive constant independent of pi.
double inpo_displayed_loss(const PolicyTable& pi, const PolicyTable& p_k,
                           const PreferenceOracle& oracle, const ContextDistribution& rho,
                           const InpoConfig& config);

std::vector<double> inpo_displayed_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                            const PreferenceOracle& oracle,
                                            const ContextDistribution& rho,
                                            const InpoConfig& config);

/// Pairwise chi^2-regularized adversarial objective at
/// dr(x,y,y') = eta h^k: E[(w(y) - w(y')) dr - (c/2) dr^2]. Its logit
/// gradient is exactly -(c eta^2 / 2) times the paired-loss gradient.
double inpo_ail_objective(const PolicyTable& pi, const PolicyTable& p_k,
                          const PreferenceOracle& oracle, const ContextDistribution& rho,
                          const InpoConfig& config, double c);

std::vector<double> inpo_ail_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                      const PreferenceOracle& oracle,
                                      const ContextDistribution& rho, const InpoConfig& config,
                                      double c);

PolicyTable inpo_step(const PolicyTable& p_k, const PreferenceOracle& oracle,
                      const ContextDistribution& rho, const InpoConfig& config,
                      int inner_steps, double lr);

// -- Iterative DPO --------------------------------------------------------------

/// pi^{k+1}(y|x) proportional to pi^k(y|x) (P(y > y_ref)/(1 - P(y > y_ref)))^{1/beta}.
/// Requires a Bradley-Terry oracle (the odds ratio equals the latent reward
/// difference, which is how the tilt is evaluated); the normalized update is
/// invariant to the choice of y_ref.
PolicyTable iterative_dpo_step(const PolicyTable& p_k, const PreferenceOracle& oracle,
                               double beta, int y_ref = 0);

/// Per-iteration (k, KL(pi*||pi^{k+1}), KL(pi*||pi^k) - KL(pi^{k+1}||pi^k)),
/// KLs averaged uniformly over contexts.
std::vector<std::tuple<int, double, double>> contraction_check_dpo(
    const std::vector<PolicyTable>& history, const PolicyTable& p_star);

}  // namespace spbandit

#endif  // SPBANDIT_BASELINES_HPP
