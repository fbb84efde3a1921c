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

#include <cmath>

#include "doctest.h"
#include "spbandit/policy_player.hpp"

using namespace spbandit;

namespace {

const BanditSpace kSpace(1, 2);
const ContextDistribution kRho = ContextDistribution::uniform(kSpace);

}  // namespace

TEST_CASE("kl_regularized_update") {
  const PolicyTable p_k = PolicyTable::from_probs(kSpace, {0.5, 0.5});
  const RewardTable zero = RewardTable::zeros(kSpace, 1.0);
  CHECK(kl_regularized_update(p_k, zero, 1.0).probs() == p_k.probs());

  const RewardTable tilt{kSpace, {std::log(3.0), 0.0}, 2.0};
  const PolicyTable updated = kl_regularized_update(p_k, tilt, 1.0);
  CHECK(updated.prob(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(updated.prob(0, 1) == doctest::Approx(0.25).epsilon(1e-12));

  const PolicyTable frozen = kl_regularized_update(p_k, tilt, 1e12);
  CHECK(frozen.prob(0, 0) == doctest::Approx(0.5).epsilon(1e-10));

  CHECK_THROWS_AS(kl_regularized_update(p_k, tilt, 0.0), std::invalid_argument);
}

TEST_CASE("log_partition") {
  const PolicyTable p_k = PolicyTable::from_probs(kSpace, {0.5, 0.5});
  const RewardTable zero = RewardTable::zeros(kSpace, 1.0);
  CHECK(log_partition(p_k, zero, 1.0)[0] == doctest::Approx(0.0).epsilon(1e-14));

  const RewardTable constant{kSpace, {1.7, 1.7}, 2.0};
  CHECK(log_partition(p_k, constant, 2.0)[0] == doctest::Approx(0.85).epsilon(1e-12));

  const RewardTable tilt{kSpace, {std::log(3.0), 0.0}, 2.0};
  CHECK(log_partition(p_k, tilt, 1.0)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("reward mapping and the round-trip identity") {
  const PolicyTable p_k = PolicyTable::from_probs(kSpace, {0.5, 0.5});
  CHECK(reward_mapping(p_k, p_k, 1.0).max_abs() == doctest::Approx(0.0).epsilon(1e-14));

  const PolicyTable pi = PolicyTable::from_probs(kSpace, {0.75, 0.25});
  const RewardTable dr = reward_mapping(pi, p_k, 1.0);
  CHECK(dr(0, 0) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(dr(0, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-12));

  Rng rng(31);
  const BanditSpace space(3, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const PolicyTable a = random_policy(space, 0.8, rng);
    const PolicyTable b = random_policy(space, 0.8, rng);
    const double beta = rng.uniform(0.2, 5.0);
    const PolicyTable back = kl_regularized_update(b, reward_mapping(a, b, beta), beta);
    for (int i = 0; i < space.cells(); ++i) {
      CHECK(back.probs()[i] == doctest::Approx(a.probs()[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("one-step descent check") {
  const PolicyTable p_star = PolicyTable::from_probs(kSpace, {0.8, 0.2});
  const PolicyTable p = PolicyTable::from_probs(kSpace, {0.4, 0.6});
  const RewardTable zero = RewardTable::zeros(kSpace, 1.0);
  const auto [lhs0, rhs0] = one_step_descent_check(p_star, p, zero, 1.0, kRho);
  CHECK(lhs0 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rhs0 == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const BanditSpace space(1 + trial % 3, 2 + trial % 4);
    const ContextDistribution rho = ContextDistribution::uniform(space);
    const PolicyTable a = random_policy(space, 0.7, rng);
    const PolicyTable b = random_policy(space, 0.7, rng);
    std::vector<double> v(space.cells());
    const double r_max = rng.uniform(0.2, 3.0);
    for (double& x : v) x = rng.uniform(-r_max, r_max);
    const RewardTable r{space, v, r_max};
    const double beta = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
    const auto [lhs, rhs] = one_step_descent_check(a, b, r, beta, rho);
    CHECK(lhs <= rhs + 1e-10);

    const auto [lhs_eq, rhs_eq] = one_step_descent_check(a, a, r, beta, rho);
    CHECK(lhs_eq == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lhs_eq <= rhs_eq + 1e-12);
  }
}

TEST_CASE("tilted row KL stays under the quadratic bound") {
  Rng rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const BanditSpace space(1 + trial % 2, 2 + trial % 5);
    const PolicyTable p = random_policy(space, 0.7, rng);
    std::vector<double> v(space.cells());
    const double r_max = rng.uniform(0.2, 3.0);
    for (double& x : v) x = rng.uniform(-r_max, r_max);
    const RewardTable r{space, v, r_max};
    const double beta = std::exp(rng.uniform(std::log(0.2), std::log(50.0)));
    const PolicyTable p_next = kl_regularized_update(p, r, beta);
    const double bound = r.max_abs() * r.max_abs() / (2.0 * beta * beta);
    for (int x = 0; x < space.n_contexts; ++x) {
      CHECK(kl_row(p_next, p, x) <= bound + 1e-10);
    }
  }
}
