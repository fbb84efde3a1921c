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

#include "spbandit/policy_player.hpp"

#include <algorithm>
#include <cmath>

namespace spbandit {

PolicyTable kl_regularized_update(const PolicyTable& p_k, const RewardTable& r, double beta) {
  require(beta > 0.0, "kl_regularized_update: beta must be positive");
  check_same_space(p_k.space(), r.space, "kl_regularized_update");
  const BanditSpace& space = p_k.space();
  const int Y = space.n_responses;
  std::vector<double> probs(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    double m = -std::numeric_limits<double>::infinity();
    for (int y = 0; y < Y; ++y) m = std::max(m, r(x, y) / beta);
    double sum = 0.0;
    for (int y = 0; y < Y; ++y) {
      const double w = p_k.prob(x, y) * std::exp(r(x, y) / beta - m);
      probs[x * Y + y] = w;
      sum += w;
    }
    if (!std::isfinite(sum) || sum <= 0.0) {
      throw NumericalError("kl_regularized_update: tilted row underflowed");
    }
    for (int y = 0; y < Y; ++y) probs[x * Y + y] /= sum;
  }
  return PolicyTable::from_probs(space, std::move(probs));
}

std::vector<double> log_partition(const PolicyTable& p_k, const RewardTable& r, double beta) {
  require(beta > 0.0, "log_partition: beta must be positive");
  check_same_space(p_k.space(), r.space, "log_partition");
  const BanditSpace& space = p_k.space();
  std::vector<double> z(space.n_contexts);
  for (int x = 0; x < space.n_contexts; ++x) {
    double m = -std::numeric_limits<double>::infinity();
    for (int y = 0; y < space.n_responses; ++y) {
      m = std::max(m, std::log(p_k.prob(x, y)) + r(x, y) / beta);
    }
    double sum = 0.0;
    for (int y = 0; y < space.n_responses; ++y) {
      sum += std::exp(std::log(p_k.prob(x, y)) + r(x, y) / beta - m);
    }
    z[x] = m + std::log(sum);
  }
  return z;
}

RewardTable reward_mapping(const PolicyTable& pi, const PolicyTable& p_k, double beta) {
  require(beta > 0.0, "reward_mapping: beta must be positive");
  check_same_space(pi.space(), p_k.space(), "reward_mapping");
  const BanditSpace& space = pi.space();
  std::vector<double> values(space.cells());
  double max_abs = 0.0;
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < space.n_responses; ++y) {
      const double v = beta * (std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y)));
      values[x * space.n_responses + y] = v;
      max_abs = std::max(max_abs, std::abs(v));
    }
  }
  return RewardTable{space, std::move(values), std::max(max_abs, kProbFloor)};
}

double kl_row(const PolicyTable& p, const PolicyTable& q, int x) {
  long double d = 0.0L;
  for (int y = 0; y < p.space().n_responses; ++y) {
    const double a = p.prob(x, y);
    d += static_cast<long double>(a) * (std::log(a) - std::log(q.prob(x, y)));
  }
  return static_cast<double>(d);
}

double expected_kl(const ContextDistribution& rho, const PolicyTable& p, const PolicyTable& q) {
  check_same_space(p.space(), q.space(), "expected_kl");
  long double total = 0.0L;
  for (int x = 0; x < p.space().n_contexts; ++x) {
    total += static_cast<long double>(rho.prob(x)) * kl_row(p, q, x);
  }
  return static_cast<double>(total);
}

double expected_tv(const ContextDistribution& rho, const PolicyTable& p, const PolicyTable& q) {
  check_same_space(p.space(), q.space(), "expected_tv");
  long double total = 0.0L;
  for (int x = 0; x < p.space().n_contexts; ++x) {
    long double d = 0.0L;
    for (int y = 0; y < p.space().n_responses; ++y) {
      d += std::abs(p.prob(x, y) - q.prob(x, y));
    }
    total += static_cast<long double>(rho.prob(x)) * 0.5L * d;
  }
  return static_cast<double>(total);
}

std::pair<double, double> one_step_descent_check(const PolicyTable& p_star,
                                                 const PolicyTable& p, const RewardTable& r,
                                                 double beta, const ContextDistribution& rho) {
  require(beta > 0.0, "one_step_descent_check: beta must be positive");
  check_same_space(p_star.space(), p.space(), "one_step_descent_check");
  check_same_space(p.space(), r.space, "one_step_descent_check");
  const PolicyTable p_next = kl_regularized_update(p, r, beta);
  const double eta = 1.0 / beta;
  // The lemma holds for any bound >= ||r||_inf; use the realized norm so the
  // inequality is reported at its tightest.
  const double r_max = r.max_abs();

  long double lhs = 0.0L;
  for (int x = 0; x < p.space().n_contexts; ++x) {
    long double inner = 0.0L;
    for (int y = 0; y < p.space().n_responses; ++y) {
      inner += r(x, y) * (p_star.prob(x, y) - p.prob(x, y));
    }
    lhs += static_cast<long double>(rho.prob(x)) * inner;
  }
  const double rhs = eta * r_max * r_max / 2.0 +
                     (1.0 / eta) * (expected_kl(rho, p_star, p) - expected_kl(rho, p_star, p_next));
  return {static_cast<double>(lhs), rhs};
}

}  // namespace spbandit
