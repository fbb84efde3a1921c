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

#include "spbandit/divergences.hpp"

#include <cmath>

namespace spbandit {

DivergenceKind DivergenceKind::mixed_chi2(double alpha, double c) {
  require(alpha > 0.0 && alpha < 1.0, "MixedChi2: alpha must lie in (0,1)");
  require(c > 0.0, "MixedChi2: c must be positive");
  DivergenceKind k;
  k.tag = Tag::kMixedChi2;
  k.alpha = alpha;
  k.c = c;
  return k;
}

double divergence(const DivergenceKind& kind, const PolicyTable& p_star,
                  const PolicyTable& p, const ContextDistribution& rho) {
  check_same_space(p_star.space(), p.space(), "divergence");
  require(rho.size() == p.space().n_contexts, "divergence: rho length mismatch");
  const int X = p.space().n_contexts;
  const int Y = p.space().n_responses;
  long double total = 0.0L;
  for (int x = 0; x < X; ++x) {
    long double d = 0.0L;
    for (int y = 0; y < Y; ++y) {
      const double a = p_star.prob(x, y);
      const double b = p.prob(x, y);
      switch (kind.tag) {
        case DivergenceKind::Tag::kTV:
          d += 0.5L * std::abs(a - b);
          break;
        case DivergenceKind::Tag::kKL:
          d += static_cast<long double>(a) * (std::log(a) - std::log(b));
          break;
        case DivergenceKind::Tag::kChi2:
          d += static_cast<long double>(b - a) * (b - a) / a;
          break;
        case DivergenceKind::Tag::kMixedChi2: {
          const double mix = kind.alpha * a + (1.0 - kind.alpha) * b;
          d += static_cast<long double>(a - b) * (a - b) / (4.0 * kind.c * mix);
          break;
        }
      }
    }
    total += static_cast<long double>(rho.prob(x)) * d;
  }
  return static_cast<double>(total);
}

RewardTable optimal_mixed_chi2_reward(const PolicyTable& p_star, const PolicyTable& p,
                                      double c) {
  require(c > 0.0, "optimal_mixed_chi2_reward: c must be positive");
  check_same_space(p_star.space(), p.space(), "optimal_mixed_chi2_reward");
  const BanditSpace& space = p.space();
  std::vector<double> values(space.cells(), 0.0);
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < space.n_responses; ++y) {
      const double a = p_star.prob(x, y);
      const double b = p.prob(x, y);
      if (a <= kFloorDetect && b <= kFloorDetect) continue;  // unsupported cell
      values[x * space.n_responses + y] = (a - b) / (c * (a + b));
    }
  }
  return RewardTable::boxed(space, std::move(values), 1.0 / c);
}

double variational_value(const RewardTable& r, const PolicyTable& p_star,
                         const PolicyTable& p, const ContextDistribution& rho, double c,
                         double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "variational_value: alpha must lie in [0,1]");
  check_same_space(p_star.space(), p.space(), "variational_value");
  check_same_space(r.space, p.space(), "variational_value");
  long double total = 0.0L;
  for (int x = 0; x < p.space().n_contexts; ++x) {
    long double v = 0.0L;
    for (int y = 0; y < p.space().n_responses; ++y) {
      const double a = p_star.prob(x, y);
      const double b = p.prob(x, y);
      const double rv = r(x, y);
      v += a * (rv - c * alpha * rv * rv) - b * (rv + c * (1.0 - alpha) * rv * rv);
    }
    total += static_cast<long double>(rho.prob(x)) * v;
  }
  return static_cast<double>(total);
}

std::pair<RewardTable, double> brute_force_variational_max(const PolicyTable& p_star,
                                                           const PolicyTable& p,
                                                           const ContextDistribution& rho,
                                                           double c, double grid_step) {
  require(c > 0.0, "brute_force_variational_max: c must be positive");
  require(grid_step > 0.0 && grid_step <= 1.0 / c,
          "brute_force_variational_max: grid_step must lie in (0, 1/c]");
  check_same_space(p_star.space(), p.space(), "brute_force_variational_max");
  const BanditSpace& space = p.space();
  const double lo = -1.0 / c;
  const double hi = 1.0 / c;
  const int steps = static_cast<int>(std::floor((hi - lo) / grid_step));
  std::vector<double> values(space.cells(), 0.0);
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < space.n_responses; ++y) {
      const double a = p_star.prob(x, y);
      const double b = p.prob(x, y);
      double best_r = lo;
      double best_v = a * (lo - 0.5 * c * lo * lo) - b * (lo + 0.5 * c * lo * lo);
      for (int i = 1; i <= steps; ++i) {
        const double r = std::min(lo + i * grid_step, hi);
        const double v = a * (r - 0.5 * c * r * r) - b * (r + 0.5 * c * r * r);
        if (v > best_v) {
          best_v = v;
          best_r = r;
        }
      }
      // Make sure the upper endpoint is always scanned.
      const double v_hi = a * (hi - 0.5 * c * hi * hi) - b * (hi + 0.5 * c * hi * hi);
      if (v_hi > best_v) best_r = hi;
      values[x * space.n_responses + y] = best_r;
    }
  }
  RewardTable table = RewardTable::boxed(space, std::move(values), 1.0 / c);
  const double value = variational_value(table, p_star, p, rho, c, 0.5);
  return {std::move(table), value};
}

}  // namespace spbandit
