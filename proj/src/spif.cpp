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

#include "spbandit/spif.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spbandit {

SpifLossSpec SpifLossSpec::make(double beta, double c, double alpha, double zeta,
                                RegularizerForm form) {
  require(beta > 0.0, "SpifLossSpec: beta must be positive");
  require(c > 0.0, "SpifLossSpec: c must be positive");
  require(alpha > 0.0 && alpha < 1.0, "SpifLossSpec: alpha must lie in (0,1)");
  require(zeta >= 0.0, "SpifLossSpec: zeta must be non-negative");
  return SpifLossSpec{beta, c, alpha, zeta, form};
}

SampledDataset SampledDataset::sample(const PolicyTable& pi, const ContextDistribution& rho,
                                      int n, Rng& rng, Source source, int model_iteration) {
  require(n > 0, "SampledDataset: sample size must be positive");
  SampledDataset d;
  d.source = source;
  d.model_iteration = model_iteration;
  d.pairs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    int x = rho.size() - 1;
    double acc = 0.0;
    for (int j = 0; j < rho.size(); ++j) {
      acc += rho.prob(j);
      if (u < acc) {
        x = j;
        break;
      }
    }
    d.pairs.emplace_back(x, sample_response(pi, x, rng));
  }
  return d;
}

namespace {

// Per-cell weights for the three loss terms. loss =
//   sum w_max (beta u - r_max)^2 + sum w_min (beta u - r_min)^2 + sum w_reg u^2
// with u = log pi - log pi^k.
struct SpifWeights {
  std::vector<double> w_max;
  std::vector<double> w_min;
  std::vector<double> w_reg;
};

SpifWeights exact_weights(const PolicyTable& p_k, const PolicyTable& p_star,
                          const ContextDistribution& rho, const SpifLossSpec& spec) {
  const BanditSpace& space = p_k.space();
  SpifWeights w{std::vector<double>(space.cells()), std::vector<double>(space.cells()),
                std::vector<double>(space.cells())};
  for (int x = 0; x < space.n_contexts; ++x) {
    const double r = rho.prob(x);
    for (int y = 0; y < space.n_responses; ++y) {
      const int i = x * space.n_responses + y;
      w.w_max[i] = spec.alpha * r * p_star.prob(x, y);
      w.w_min[i] = (1.0 - spec.alpha) * r * p_k.prob(x, y);
      if (spec.form == SpifLossSpec::RegularizerForm::kUnionMixture) {
        w.w_reg[i] = 0.5 * spec.zeta * r * 0.5 * (p_star.prob(x, y) + p_k.prob(x, y));
      } else {
        w.w_reg[i] = 0.5 * spec.zeta * r * p_star.prob(x, y) * spec.beta * spec.beta;
      }
    }
  }
  return w;
}

double weighted_loss(const PolicyTable& pi, const PolicyTable& p_k, const SpifWeights& w,
                     const SpifLossSpec& spec) {
  const BanditSpace& space = pi.space();
  const double r_max = spec.r_max_target();
  const double r_min = spec.r_min_target();
  long double loss = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < space.n_responses; ++y) {
      const int i = x * space.n_responses + y;
      const double u = std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y));
      const double dr = spec.beta * u;
      loss += w.w_max[i] * (dr - r_max) * (dr - r_max) +
              w.w_min[i] * (dr - r_min) * (dr - r_min) + w.w_reg[i] * u * u;
    }
  }
  return static_cast<double>(loss);
}

// Gradient with respect to pi's logits via dL/d(log pi) and the row-softmax
// chain rule d log pi(z)/d logit(w) = delta_{zw} - pi(w).
std::vector<double> weighted_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                      const SpifWeights& w, const SpifLossSpec& spec) {
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const double r_max = spec.r_max_target();
  const double r_min = spec.r_min_target();
  std::vector<double> grad(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    double vsum = 0.0;
    std::vector<double> v(Y);
    for (int y = 0; y < Y; ++y) {
      const int i = x * Y + y;
      const double u = std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y));
      const double dr = spec.beta * u;
      v[y] = 2.0 * spec.beta * (w.w_max[i] * (dr - r_max) + w.w_min[i] * (dr - r_min)) +
             2.0 * w.w_reg[i] * u;
      vsum += v[y];
    }
    for (int y = 0; y < Y; ++y) {
      grad[x * Y + y] = v[y] - pi.prob(x, y) * vsum;
    }
  }
  return grad;
}

SpifWeights dataset_weights(const BanditSpace& space, const SampledDataset& d_star,
                            const SampledDataset& d_k, const SpifLossSpec& spec) {
  require(!d_star.pairs.empty() && !d_k.pairs.empty(),
          "spif_loss_sampled: datasets must be non-empty");
  std::vector<double> ws(space.cells(), 0.0);
  std::vector<double> wk(space.cells(), 0.0);
  for (const auto& [x, y] : d_star.pairs) ws[x * space.n_responses + y] += 1.0;
  for (const auto& [x, y] : d_k.pairs) wk[x * space.n_responses + y] += 1.0;
  for (double& v : ws) v /= static_cast<double>(d_star.pairs.size());
  for (double& v : wk) v /= static_cast<double>(d_k.pairs.size());

  SpifWeights w{std::vector<double>(space.cells()), std::vector<double>(space.cells()),
                std::vector<double>(space.cells())};
  for (int i = 0; i < space.cells(); ++i) {
    w.w_max[i] = 0.5 * ws[i];
    w.w_min[i] = 0.5 * wk[i];
    w.w_reg[i] = 0.5 * spec.zeta * 0.5 * (ws[i] + wk[i]);
  }
  return w;
}

SpifWeights normalized_cell_weights(const BanditSpace& space,
                                    const std::vector<double>& weights_star,
                                    const std::vector<double>& weights_model,
                                    const SpifLossSpec& spec) {
  require(static_cast<int>(weights_star.size()) == space.cells() &&
              static_cast<int>(weights_model.size()) == space.cells(),
          "spif_loss_weighted: weight tables must match the space");
  SpifWeights w{std::vector<double>(space.cells()), std::vector<double>(space.cells()),
                std::vector<double>(space.cells())};
  for (int i = 0; i < space.cells(); ++i) {
    w.w_max[i] = 0.5 * weights_star[i];
    w.w_min[i] = 0.5 * weights_model[i];
    w.w_reg[i] = 0.5 * spec.zeta * 0.5 * (weights_star[i] + weights_model[i]);
  }
  return w;
}

double max_abs_mapped_reward(const PolicyTable& pi, const PolicyTable& p_k, double beta) {
  double m = 0.0;
  for (int x = 0; x < pi.space().n_contexts; ++x) {
    for (int y = 0; y < pi.space().n_responses; ++y) {
      m = std::max(m, std::abs(beta * (std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y)))));
    }
  }
  return m;
}

}  // namespace

double spif_loss_exact(const PolicyTable& pi, const PolicyTable& p_k,
                       const PolicyTable& p_star, const ContextDistribution& rho,
                       const SpifLossSpec& spec) {
  check_same_space(pi.space(), p_k.space(), "spif_loss_exact");
  check_same_space(pi.space(), p_star.space(), "spif_loss_exact");
  return weighted_loss(pi, p_k, exact_weights(p_k, p_star, rho, spec), spec);
}

double spif_loss_weighted(const PolicyTable& pi, const PolicyTable& p_k,
                          const std::vector<double>& weights_star,
                          const std::vector<double>& weights_model,
                          const SpifLossSpec& spec) {
  check_same_space(pi.space(), p_k.space(), "spif_loss_weighted");
  return weighted_loss(pi, p_k,
                       normalized_cell_weights(pi.space(), weights_star, weights_model, spec),
                       spec);
}

double spif_loss_sampled(const PolicyTable& pi, const PolicyTable& p_k,
                         const SampledDataset& d_star, const SampledDataset& d_k,
                         const SpifLossSpec& spec) {
  check_same_space(pi.space(), p_k.space(), "spif_loss_sampled");
  return weighted_loss(pi, p_k, dataset_weights(pi.space(), d_star, d_k, spec), spec);
}

std::vector<double> spif_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                  const PolicyTable& p_star, const ContextDistribution& rho,
                                  const SpifLossSpec& spec) {
  if (!pi.has_logits()) {
    throw std::invalid_argument("spif_gradient: policy must carry logits");
  }
  check_same_space(pi.space(), p_k.space(), "spif_gradient");
  check_same_space(pi.space(), p_star.space(), "spif_gradient");
  return weighted_gradient(pi, p_k, exact_weights(p_k, p_star, rho, spec), spec);
}

void TrainOptions::validate() const {
  require(inner_steps > 0, "TrainOptions: inner_steps must be positive");
  require(lr > 0.0, "TrainOptions: lr must be positive");
  require(sample_size > 0, "TrainOptions: sample_size must be positive");
}

TrainResult spif_train(const SpifLossSpec& spec, int iterations, const PolicyTable& p_star,
                       const PolicyTable& p_ref, const ContextDistribution& rho,
                       const TrainOptions& opts) {
  require(iterations >= 1, "spif_train: iterations must be >= 1");
  opts.validate();
  check_same_space(p_star.space(), p_ref.space(), "spif_train");
  const BanditSpace& space = p_star.space();
  Rng rng(opts.seed);

  TrainResult result;
  IterateHistory& h = result.history;
  h.config.iterations = iterations;
  h.config.beta = spec.beta;
  h.config.zeta = spec.zeta;
  h.config.r_max = 1.0 / spec.c;
  h.config.regularizer = RegularizerSpec::mixed_quadratic(spec.c, spec.alpha, spec.zeta);
  h.policies.push_back(p_ref);
  h.kl_to_expert.push_back(expected_kl(rho, p_star, p_ref));

  for (int k = 1; k <= iterations; ++k) {
    const PolicyTable p_k = h.policies.back();

    SpifWeights weights =
        (opts.sampling == TrainOptions::Sampling::kExact)
            ? exact_weights(p_k, p_star, rho, spec)
            : dataset_weights(
                  space,
                  SampledDataset::sample(p_star, rho, opts.sample_size, rng,
                                         SampledDataset::Source::kExpert),
                  SampledDataset::sample(p_k, rho, opts.sample_size, rng,
                                         SampledDataset::Source::kModel, k),
                  spec);

    std::vector<double> logits(space.cells());
    for (int i = 0; i < space.cells(); ++i) logits[i] = std::log(p_k.probs()[i]);

    for (int s = 0; s < opts.inner_steps; ++s) {
      PolicyTable pi = PolicyTable::from_logits(space, logits);
      const double loss = weighted_loss(pi, p_k, weights, spec);
      if (!std::isfinite(loss)) {
        throw NumericalError("spif_train: loss diverged at iteration " + std::to_string(k));
      }
      const std::vector<double> grad = weighted_gradient(pi, p_k, weights, spec);
      double gi = 0.0;
      for (double g : grad) gi = std::max(gi, std::abs(g));
      result.steps.push_back(
          {k, s, loss, gi, max_abs_mapped_reward(pi, p_k, spec.beta)});
      for (int i = 0; i < space.cells(); ++i) logits[i] -= opts.lr * grad[i];
    }

    PolicyTable p_next = PolicyTable::from_logits(space, std::move(logits));
    RewardTable dr = reward_mapping(p_next, p_k, spec.beta);
    h.game_values.push_back(game_value(p_k, dr, p_star, rho));
    h.rewards.push_back(std::move(dr));
    h.policies.push_back(std::move(p_next));
    h.kl_to_expert.push_back(expected_kl(rho, p_star, h.policies.back()));
  }
  return result;
}

}  // namespace spbandit
