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
#include "spbandit/bandit_core.hpp"

using namespace spbandit;

TEST_CASE("space and distribution validation") {
  CHECK_THROWS_AS(BanditSpace(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(BanditSpace(1, 1), std::invalid_argument);
  const BanditSpace space(2, 3);
  CHECK_THROWS_AS(ContextDistribution(space, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(ContextDistribution(space, {-0.5, 1.5}), std::invalid_argument);
  const ContextDistribution rho = ContextDistribution::uniform(space);
  CHECK(rho.prob(0) == doctest::Approx(0.5));
}

TEST_CASE("policy table invariants") {
  const BanditSpace space(2, 3);
  CHECK_THROWS_AS(PolicyTable::from_probs(space, {1.0, 0.0, 0.0, 0.3, 0.3, 0.3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PolicyTable::from_probs(space, {1.0, 0.0, 0.0, 1.3, -0.3, 0.0}),
                  std::invalid_argument);
  const PolicyTable p = PolicyTable::from_probs(space, {1.0, 0.0, 0.0, 0.2, 0.5, 0.3});
  for (int x = 0; x < 2; ++x) {
    double sum = 0.0;
    for (int y = 0; y < 3; ++y) {
      CHECK(p.prob(x, y) >= kProbFloor * 0.999);
      sum += p.prob(x, y);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  const PolicyTable q = PolicyTable::from_logits(space, {0.0, 1.0, -1.0, 2.0, 2.0, 2.0});
  CHECK(q.has_logits());
  double z = std::exp(0.0) + std::exp(1.0) + std::exp(-1.0);
  CHECK(q.prob(0, 1) == doctest::Approx(std::exp(1.0) / z).epsilon(1e-10));
  CHECK(q.prob(1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-10));
  CHECK_THROWS_AS(p.logits(), std::invalid_argument);
}

TEST_CASE("random_policy determinism and concentration limits") {
  const BanditSpace tiny(1, 2);
  const PolicyTable sharp = random_policy(tiny, 1e9, std::uint64_t{0});
  CHECK(sharp.prob(0, 0) == doctest::Approx(0.5).epsilon(1e-3));

  const BanditSpace space(3, 4);
  const PolicyTable a = random_policy(space, 1.0, std::uint64_t{7});
  const PolicyTable b = random_policy(space, 1.0, std::uint64_t{7});
  CHECK(a.probs() == b.probs());  // bitwise

  const BanditSpace wide(2, 5);
  const PolicyTable sparse = random_policy(wide, 0.1, std::uint64_t{3});
  for (int x = 0; x < 2; ++x) {
    double sum = 0.0;
    for (int y = 0; y < 5; ++y) sum += sparse.prob(x, y);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  CHECK_THROWS_AS(random_policy(space, 0.0, std::uint64_t{1}), std::invalid_argument);
}

TEST_CASE("expected_value basics and linearity") {
  const BanditSpace space(1, 2);
  const ContextDistribution rho(space, {1.0});
  const PolicyTable pi = PolicyTable::from_probs(space, {0.25, 0.75});
  CHECK(expected_value(rho, pi, RewardTable::zeros(space, 1.0)) == 0.0);
  CHECK(expected_value(rho, pi, RewardTable::boxed(space, {1.0, 1.0}, 2.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expected_value(rho, pi, RewardTable::boxed(space, {4.0, 0.0}, 4.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  Rng rng(11);
  const BanditSpace big(3, 5);
  const ContextDistribution rho_b = ContextDistribution::uniform(big);
  for (int trial = 0; trial < 50; ++trial) {
    const PolicyTable p = random_policy(big, 1.0, rng);
    std::vector<double> fv(big.cells()), gv(big.cells()), hv(big.cells());
    const double a = rng.uniform(-10.0, 10.0);
    const double b = rng.uniform(-10.0, 10.0);
    for (int i = 0; i < big.cells(); ++i) {
      fv[i] = rng.uniform(-1.0, 1.0);
      gv[i] = rng.uniform(-1.0, 1.0);
      hv[i] = a * fv[i] + b * gv[i];
    }
    const RewardTable f{big, fv, 1.0};
    const RewardTable g{big, gv, 1.0};
    const RewardTable h{big, hv, 30.0};
    CHECK(expected_value(rho_b, p, h) ==
          doctest::Approx(a * expected_value(rho_b, p, f) + b * expected_value(rho_b, p, g))
              .epsilon(1e-10));
  }

  const RewardTable wrong = RewardTable::zeros(BanditSpace(2, 2), 1.0);
  CHECK_THROWS_AS(expected_value(rho, pi, wrong), std::invalid_argument);
}

TEST_CASE("sample_response") {
  const BanditSpace space(1, 3);
  const PolicyTable degenerate = PolicyTable::from_probs(space, {1.0, 0.0, 0.0});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(sample_response(degenerate, 0, rng) == 0);

  const BanditSpace coin(1, 2);
  const PolicyTable fair = PolicyTable::from_probs(coin, {0.5, 0.5});
  Rng rng2(42);
  int zeros = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) zeros += sample_response(fair, 0, rng2) == 0 ? 1 : 0;
  const double freq = static_cast<double>(zeros) / n;
  CHECK(freq >= 0.494);  // binomial 3 sigma
  CHECK(freq <= 0.506);

  Rng s1(9), s2(9);
  for (int i = 0; i < 50; ++i) CHECK(sample_response(fair, 0, s1) == sample_response(fair, 0, s2));

  CHECK_THROWS_AS(sample_response(fair, 2, rng), std::out_of_range);
}
