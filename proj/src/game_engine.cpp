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

#include "spbandit/game_engine.hpp"

#include <cmath>

#include "spbandit/divergences.hpp"

namespace spbandit {

void GameConfig::validate() const {
  require(iterations >= 1, "GameConfig: iterations must be >= 1");
  require(beta > 0.0, "GameConfig: beta must be positive");
  require(zeta > 0.0, "GameConfig: zeta must be positive");
  require(r_max > 0.0, "GameConfig: r_max must be positive");
}

double game_value(const PolicyTable& pi, const RewardTable& r, const PolicyTable& p_star,
                  const ContextDistribution& rho) {
  return expected_value(rho, p_star, r) - expected_value(rho, pi, r);
}

IterateHistory run_selfplay(const GameConfig& config, const PolicyTable& p_star,
                            const PolicyTable& p_ref, const ContextDistribution& rho) {
  config.validate();
  check_same_space(p_star.space(), p_ref.space(), "run_selfplay");
  const BanditSpace& space = p_star.space();

  IterateHistory h;
  h.config = config;
  h.policies.reserve(config.iterations + 1);
  h.rewards.reserve(config.iterations);
  h.policies.push_back(p_ref);
  h.kl_to_expert.push_back(expected_kl(rho, p_star, p_ref));

  RewardTable r_prev = RewardTable::zeros(space, config.r_max);
  // MixedQuadratic with zeta: the spec's RegularizerSpec carries its own
  // bregman weight; the game-level zeta wins so one knob drives the run.
  RegularizerSpec reg = config.regularizer;
  reg.bregman_weight = config.zeta;

  for (int k = 1; k <= config.iterations; ++k) {
    const PolicyTable& p_k = h.policies.back();
    RewardTable r_k =
        (reg.psi == RegularizerSpec::Psi::kBox)
            ? omd_reward_step(r_prev, p_star, p_k, rho, config.zeta, config.r_max)
            : proximal_mixed_reward_step(r_prev, p_star, p_k, rho, reg, config.r_max);
    h.game_values.push_back(game_value(p_k, r_k, p_star, rho));

    PolicyTable p_next = [&] {
      if (config.mode == GameConfig::Mode::kMappedDeltaR) {
        // Replace r^k by Delta r = r^k - beta log Z(x) before the policy step.
        const std::vector<double> z = log_partition(p_k, r_k, config.beta);
        std::vector<double> mapped(space.cells());
        for (int x = 0; x < space.n_contexts; ++x) {
          for (int y = 0; y < space.n_responses; ++y) {
            mapped[x * space.n_responses + y] = r_k(x, y) - config.beta * z[x];
          }
        }
        RewardTable dr{space, std::move(mapped), 0.0};
        double m = dr.max_abs();
        dr.r_max_bound = m > 0.0 ? m : 1.0;
        return kl_regularized_update(p_k, dr, config.beta);
      }
      return kl_regularized_update(p_k, r_k, config.beta);
    }();

    h.policies.push_back(std::move(p_next));
    h.kl_to_expert.push_back(expected_kl(rho, p_star, h.policies.back()));
    r_prev = r_k;  // the proximal anchor stays the unmapped reward iterate
    h.rewards.push_back(std::move(r_k));
  }
  return h;
}

namespace {

PolicyTable average_policies(const std::vector<PolicyTable>& policies, int count) {
  const BanditSpace& space = policies.front().space();
  std::vector<double> sum(space.cells(), 0.0);
  for (int k = 0; k < count; ++k) {
    const auto& p = policies[k].probs();
    for (int i = 0; i < space.cells(); ++i) sum[i] += p[i];
  }
  for (double& v : sum) v /= count;
  return PolicyTable::from_probs(space, std::move(sum));
}

// Plain average of the iterates; deliberately not clamped, so that training
// traces whose mapped rewards exceed the nominal box still report the gap of
// their true averages. Game iterates already live in the box.
RewardTable average_rewards(const std::vector<RewardTable>& rewards, double r_max) {
  const BanditSpace& space = rewards.front().space;
  std::vector<double> sum(space.cells(), 0.0);
  for (const auto& r : rewards) {
    for (int i = 0; i < space.cells(); ++i) sum[i] += r.values[i];
  }
  for (double& v : sum) v /= static_cast<double>(rewards.size());
  RewardTable avg{space, std::move(sum), r_max};
  avg.r_max_bound = std::max(r_max, avg.max_abs());
  return avg;
}

}  // namespace

DualityGapReport duality_gap(const IterateHistory& history, const PolicyTable& p_star,
                             const ContextDistribution& rho, double r_max) {
  require(!history.rewards.empty(), "duality_gap: empty history");
  const int K = static_cast<int>(history.rewards.size());
  const BanditSpace& space = p_star.space();

  PolicyTable avg_policy = average_policies(history.policies, K);
  RewardTable avg_reward = average_rewards(history.rewards, r_max);

  // max_r J(pi_bar, r) over the box, attained at the sign reward.
  const RewardTable best_r = sign_reward(p_star, avg_policy, r_max);
  const double max_term = game_value(avg_policy, best_r, p_star, rho);

  // min_pi J(pi, r_bar): the minimizing policy puts all mass on
  // argmax_y r_bar(x,y), so the minimum is E_rho[E_{pi*} r_bar - max_y r_bar].
  long double min_term = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    long double expert = 0.0L;
    double best = avg_reward(x, 0);
    for (int y = 0; y < space.n_responses; ++y) {
      expert += p_star.prob(x, y) * avg_reward(x, y);
      if (avg_reward(x, y) > best) best = avg_reward(x, y);
    }
    min_term += static_cast<long double>(rho.prob(x)) * (expert - best);
  }

  DualityGapReport report{
      .gap = max_term - static_cast<double>(min_term),
      .avg_policy = std::move(avg_policy),
      .avg_reward = std::move(avg_reward),
  };

  for (int k = 0; k < K; ++k) {
    report.d_const = std::max(report.d_const, history.kl_to_expert[k]);
  }

  if (history.config.regularizer.psi == RegularizerSpec::Psi::kMixedQuadratic) {
    report.b_available = true;
    report.b_const = 0.0;
    for (int k = 0; k < K; ++k) {
      const RewardTable closed = optimal_mixed_chi2_reward(
          p_star, history.policies[k], history.config.regularizer.c);
      report.b_const = std::max(
          report.b_const, bregman_distance(closed, history.rewards[k]) / (r_max * r_max));
    }
  }

  const double b_for_bound =
      report.b_available ? report.b_const : 2.0 * space.n_contexts * space.n_responses;
  report.bound_value =
      (report.d_const + b_for_bound) * r_max * r_max / std::sqrt(static_cast<double>(K));
  return report;
}

std::pair<double, double> rate_fit(const std::vector<std::pair<int, double>>& gaps) {
  std::vector<int> distinct;
  for (const auto& [k, gap] : gaps) {
    if (gap <= 0.0) {
      throw std::domain_error("rate_fit: non-positive gap (converged below tolerance)");
    }
    bool seen = false;
    for (int d : distinct) seen = seen || d == k;
    if (!seen) distinct.push_back(k);
  }
  if (distinct.size() < 3) {
    throw std::domain_error("rate_fit: need at least 3 distinct K values");
  }
  // Least squares on log gap = a - e log K.
  const int n = static_cast<int>(gaps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [k, gap] : gaps) {
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  return {-slope, std::exp(intercept)};
}

}  // namespace spbandit
