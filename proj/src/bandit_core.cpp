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

#include "spbandit/bandit_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spbandit {

namespace {

// Floor every entry at kProbFloor, then renormalize the row.
void floor_and_normalize_row(double* row, int n) {
  double sum = 0.0;
  for (int y = 0; y < n; ++y) {
    if (!(row[y] >= kProbFloor)) row[y] = kProbFloor;
    sum += row[y];
  }
  if (!std::isfinite(sum) || sum <= 0.0) {
    throw NumericalError("policy row is degenerate (non-finite or zero mass)");
  }
  for (int y = 0; y < n; ++y) row[y] /= sum;
}

}  // namespace

BanditSpace::BanditSpace(int contexts, int responses)
    : n_contexts(contexts), n_responses(responses) {
  require(contexts >= 1, "BanditSpace: n_contexts must be >= 1");
  require(responses >= 2, "BanditSpace: n_responses must be >= 2");
}

ContextDistribution::ContextDistribution(BanditSpace space, std::vector<double> probs)
    : probs_(std::move(probs)) {
  require(static_cast<int>(probs_.size()) == space.n_contexts,
          "ContextDistribution: length must equal n_contexts");
  double sum = 0.0;
  for (double p : probs_) {
    require(p >= 0.0, "ContextDistribution: negative probability");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "ContextDistribution: entries must sum to 1");
}

ContextDistribution ContextDistribution::uniform(const BanditSpace& space) {
  std::vector<double> p(space.n_contexts, 1.0 / space.n_contexts);
  // Kill the residual rounding so the sum-to-1 invariant is exact for any n.
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return ContextDistribution(space, std::move(p));
}

PolicyTable PolicyTable::uniform(const BanditSpace& space) {
  std::vector<double> probs(space.cells(), 1.0 / space.n_responses);
  for (int x = 0; x < space.n_contexts; ++x) {
    floor_and_normalize_row(probs.data() + static_cast<std::size_t>(x) * space.n_responses,
                            space.n_responses);
  }
  return PolicyTable(space, std::move(probs), std::nullopt);
}

PolicyTable PolicyTable::from_probs(const BanditSpace& space, std::vector<double> row_major) {
  require(static_cast<int>(row_major.size()) == space.cells(),
          "PolicyTable: size must equal n_contexts * n_responses");
  for (int x = 0; x < space.n_contexts; ++x) {
    double sum = 0.0;
    for (int y = 0; y < space.n_responses; ++y) {
      double p = row_major[x * space.n_responses + y];
      require(p >= 0.0, "PolicyTable: negative probability");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "PolicyTable: row does not sum to 1");
    floor_and_normalize_row(row_major.data() + static_cast<std::size_t>(x) * space.n_responses,
                            space.n_responses);
  }
  return PolicyTable(space, std::move(row_major), std::nullopt);
}

PolicyTable PolicyTable::from_logits(const BanditSpace& space, std::vector<double> logits) {
  require(static_cast<int>(logits.size()) == space.cells(),
          "PolicyTable: logits size must equal n_contexts * n_responses");
  std::vector<double> probs(space.cells());
  const int n = space.n_responses;
  for (int x = 0; x < space.n_contexts; ++x) {
    const double* l = logits.data() + static_cast<std::size_t>(x) * n;
    double m = l[0];
    for (int y = 1; y < n; ++y) m = std::max(m, l[y]);
    require(std::isfinite(m), "PolicyTable: non-finite logit");
    double* p = probs.data() + static_cast<std::size_t>(x) * n;
    for (int y = 0; y < n; ++y) p[y] = std::exp(l[y] - m);
    floor_and_normalize_row(p, n);
  }
  return PolicyTable(space, std::move(probs), std::move(logits));
}

const std::vector<double>& PolicyTable::logits() const {
  if (!logits_) throw std::invalid_argument("PolicyTable: logits were not provided");
  return *logits_;
}

RewardTable RewardTable::zeros(const BanditSpace& space, double r_max_bound) {
  require(r_max_bound > 0.0, "RewardTable: r_max_bound must be positive");
  return RewardTable{space, std::vector<double>(space.cells(), 0.0), r_max_bound};
}

RewardTable RewardTable::boxed(const BanditSpace& space, std::vector<double> values,
                               double r_max_bound) {
  require(r_max_bound > 0.0, "RewardTable: r_max_bound must be positive");
  require(static_cast<int>(values.size()) == space.cells(),
          "RewardTable: size must equal n_contexts * n_responses");
  for (double& v : values) v = clamp(v, -r_max_bound, r_max_bound);
  return RewardTable{space, std::move(values), r_max_bound};
}

double RewardTable::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void check_same_space(const BanditSpace& a, const BanditSpace& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

PolicyTable random_policy(const BanditSpace& space, double concentration, Rng& rng) {
  require(concentration > 0.0, "random_policy: concentration must be positive");
  std::vector<double> probs(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    double sum = 0.0;
    for (int y = 0; y < space.n_responses; ++y) {
      double g = rng.gamma(concentration);
      probs[x * space.n_responses + y] = g;
      sum += g;
    }
    if (sum <= 0.0) sum = 1.0;  // all-zero gamma underflow; the floor takes over
    for (int y = 0; y < space.n_responses; ++y) probs[x * space.n_responses + y] /= sum;
  }
  return PolicyTable::from_probs(space, std::move(probs));
}

PolicyTable random_policy(const BanditSpace& space, double concentration, std::uint64_t seed) {
  Rng rng(seed);
  return random_policy(space, concentration, rng);
}

double expected_value(const ContextDistribution& rho, const PolicyTable& pi,
                      const RewardTable& f) {
  check_same_space(pi.space(), f.space, "expected_value");
  require(rho.size() == pi.space().n_contexts, "expected_value: rho length mismatch");
  long double total = 0.0L;
  for (int x = 0; x < pi.space().n_contexts; ++x) {
    long double inner = 0.0L;
    for (int y = 0; y < pi.space().n_responses; ++y) {
      inner += static_cast<long double>(pi.prob(x, y)) * f(x, y);
    }
    total += static_cast<long double>(rho.prob(x)) * inner;
  }
  return static_cast<double>(total);
}

int sample_response(const PolicyTable& pi, int x, Rng& rng) {
  if (x < 0 || x >= pi.space().n_contexts) {
    throw std::out_of_range("sample_response: context index out of range");
  }
  const double u = rng.uniform();
  double acc = 0.0;
  const int n = pi.space().n_responses;
  for (int y = 0; y < n; ++y) {
    acc += pi.prob(x, y);
    if (u < acc) return y;
  }
  return n - 1;
}

}  // namespace spbandit
