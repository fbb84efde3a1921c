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

#include "spbandit/reward_player.hpp"

#include <cmath>

namespace spbandit {

double link_value(LinkFunction link, double t) {
  switch (link) {
    case LinkFunction::kIdentity:
      return t;
    case LinkFunction::kLogistic:
      return -softplus(-t);
  }
  return t;
}

RegularizerSpec RegularizerSpec::box(double r_max, double zeta) {
  require(r_max > 0.0, "RegularizerSpec: Box requires r_max > 0");
  require(zeta >= 0.0, "RegularizerSpec: bregman_weight must be non-negative");
  RegularizerSpec s;
  s.psi = Psi::kBox;
  s.r_max = r_max;
  s.bregman_weight = zeta;
  return s;
}

RegularizerSpec RegularizerSpec::mixed_quadratic(double c, double alpha, double zeta) {
  require(c > 0.0, "RegularizerSpec: MixedQuadratic requires c > 0");
  require(alpha > 0.0 && alpha < 1.0, "RegularizerSpec: MixedQuadratic requires alpha in (0,1)");
  require(zeta >= 0.0, "RegularizerSpec: bregman_weight must be non-negative");
  RegularizerSpec s;
  s.psi = Psi::kMixedQuadratic;
  s.c = c;
  s.alpha = alpha;
  s.bregman_weight = zeta;
  return s;
}

double bregman_distance(const RewardTable& a, const RewardTable& b) {
  check_same_space(a.space, b.space, "bregman_distance");
  long double d = 0.0L;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const long double diff = a.values[i] - b.values[i];
    d += diff * diff;
  }
  return static_cast<double>(0.5L * d);
}

double reward_objective(const RewardTable& r, const PolicyTable& p_star,
                        const PolicyTable& p_k, const ContextDistribution& rho,
                        LinkFunction link, const RegularizerSpec& reg,
                        const RewardTable& r_prev) {
  check_same_space(r.space, p_star.space(), "reward_objective");
  check_same_space(r.space, p_k.space(), "reward_objective");
  check_same_space(r.space, r_prev.space, "reward_objective");
  const int X = r.space.n_contexts;
  const int Y = r.space.n_responses;

  if (reg.psi == RegularizerSpec::Psi::kBox && r.max_abs() > reg.r_max + 1e-12) {
    throw std::domain_error("reward_objective: reward violates the box constraint");
  }

  long double gain = 0.0L;
  long double psi = 0.0L;
  for (int x = 0; x < X; ++x) {
    long double gap = 0.0L;
    long double quad = 0.0L;
    for (int y = 0; y < Y; ++y) {
      const double rv = r(x, y);
      gap += (p_star.prob(x, y) - p_k.prob(x, y)) * rv;
      if (reg.psi == RegularizerSpec::Psi::kMixedQuadratic) {
        quad += (reg.c * reg.alpha * p_star.prob(x, y) +
                 reg.c * (1.0 - reg.alpha) * p_k.prob(x, y)) *
                rv * rv;
      }
    }
    gain += static_cast<long double>(rho.prob(x)) *
            link_value(link, static_cast<double>(gap));
    psi += static_cast<long double>(rho.prob(x)) * quad;
  }
  return static_cast<double>(gain - psi) - reg.bregman_weight * bregman_distance(r, r_prev);
}

RewardTable omd_reward_step(const RewardTable& r_prev, const PolicyTable& p_star,
                            const PolicyTable& p_k, const ContextDistribution& rho,
                            double zeta, double r_max) {
  require(zeta > 0.0, "omd_reward_step: zeta must be positive");
  check_same_space(r_prev.space, p_star.space(), "omd_reward_step");
  check_same_space(r_prev.space, p_k.space(), "omd_reward_step");
  const BanditSpace& space = r_prev.space;
  std::vector<double> values(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < space.n_responses; ++y) {
      const double g = rho.prob(x) * (p_star.prob(x, y) - p_k.prob(x, y));
      values[x * space.n_responses + y] = r_prev(x, y) + g / zeta;
    }
  }
  return RewardTable::boxed(space, std::move(values), r_max);
}

RewardTable proximal_mixed_reward_step(const RewardTable& r_prev, const PolicyTable& p_star,
                                       const PolicyTable& p_k, const ContextDistribution& rho,
                                       const RegularizerSpec& reg, double r_max) {
  require(reg.psi == RegularizerSpec::Psi::kMixedQuadratic,
          "proximal_mixed_reward_step: regularizer must be MixedQuadratic");
  check_same_space(r_prev.space, p_star.space(), "proximal_mixed_reward_step");
  check_same_space(r_prev.space, p_k.space(), "proximal_mixed_reward_step");
  const BanditSpace& space = r_prev.space;
  const double zeta = reg.bregman_weight;
  std::vector<double> values(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    const double w = rho.prob(x);
    for (int y = 0; y < space.n_responses; ++y) {
      const double a = p_star.prob(x, y);
      const double b = p_k.prob(x, y);
      const double mix = reg.alpha * a + (1.0 - reg.alpha) * b;
      double r;
      if (zeta > 0.0) {
        r = (w * (a - b) + zeta * r_prev(x, y)) / (2.0 * reg.c * w * mix + zeta);
      } else {
        r = (a - b) / (2.0 * reg.c * mix);  // rho cancels when zeta = 0
      }
      values[x * space.n_responses + y] = r;
    }
  }
  return RewardTable::boxed(space, std::move(values), r_max);
}

RewardTable sign_reward(const PolicyTable& p_star, const PolicyTable& p_bar, double r_max) {
  require(r_max > 0.0, "sign_reward: r_max must be positive");
  check_same_space(p_star.space(), p_bar.space(), "sign_reward");
  const BanditSpace& space = p_bar.space();
  std::vector<double> values(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < space.n_responses; ++y) {
      const double d = p_star.prob(x, y) - p_bar.prob(x, y);
      values[x * space.n_responses + y] = d > 0.0 ? r_max : (d < 0.0 ? -r_max : 0.0);
    }
  }
  return RewardTable{space, std::move(values), r_max};
}

}  // namespace spbandit
