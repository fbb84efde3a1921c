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

#include "spbandit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spbandit {

namespace {

// dL/dlogits from dL/dlog(pi), per the row-softmax chain rule.
std::vector<double> chain_to_logits(const PolicyTable& pi, const std::vector<double>& v) {
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  std::vector<double> grad(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    double vsum = 0.0;
    for (int y = 0; y < Y; ++y) vsum += v[x * Y + y];
    for (int y = 0; y < Y; ++y) {
      grad[x * Y + y] = v[x * Y + y] - pi.prob(x, y) * vsum;
    }
  }
  return grad;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double uniform_mean_kl(const PolicyTable& p, const PolicyTable& q) {
  double total = 0.0;
  for (int x = 0; x < p.space().n_contexts; ++x) total += kl_row(p, q, x);
  return total / p.space().n_contexts;
}

// Generic descent on logits with per-step logging; shared by the training
// baselines and spif-style dynamics comparisons.
template <typename LossFn, typename GradFn>
PolicyTable descend_logits(const PolicyTable& p_k, int inner_steps, double lr,
                           LossFn&& loss_fn, GradFn&& grad_fn, const char* who, int iteration,
                           double beta_for_dr, std::vector<TrainStep>* steps) {
  const BanditSpace& space = p_k.space();
  std::vector<double> logits(space.cells());
  for (int i = 0; i < space.cells(); ++i) logits[i] = std::log(p_k.probs()[i]);
  for (int s = 0; s < inner_steps; ++s) {
    PolicyTable pi = PolicyTable::from_logits(space, logits);
    const double loss = loss_fn(pi);
    if (!std::isfinite(loss)) {
      throw NumericalError(std::string(who) + ": loss diverged at iteration " +
                           std::to_string(iteration));
    }
    const std::vector<double> grad = grad_fn(pi);
    if (steps != nullptr) {
      double max_dr = 0.0;
      for (int x = 0; x < space.n_contexts; ++x) {
        for (int y = 0; y < space.n_responses; ++y) {
          max_dr = std::max(max_dr, std::abs(beta_for_dr * (std::log(pi.prob(x, y)) -
                                                            std::log(p_k.prob(x, y)))));
        }
      }
      steps->push_back({iteration, s, loss, inf_norm(grad), max_dr});
    }
    for (int i = 0; i < space.cells(); ++i) logits[i] -= lr * grad[i];
  }
  return PolicyTable::from_logits(space, std::move(logits));
}

}  // namespace

PreferenceOracle PreferenceOracle::bradley_terry(RewardTable latent_reward) {
  PreferenceOracle o(Kind::kBradleyTerry, latent_reward.space);
  o.latent_ = std::move(latent_reward);
  return o;
}

PreferenceOracle PreferenceOracle::general(const BanditSpace& space,
                                           std::vector<double> probs) {
  require(static_cast<int>(probs.size()) ==
              space.n_contexts * space.n_responses * space.n_responses,
          "PreferenceOracle: table must be X*Y*Y");
  const int Y = space.n_responses;
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y1 = 0; y1 < Y; ++y1) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double p = probs[(x * Y + y1) * Y + y2];
        const double q = probs[(x * Y + y2) * Y + y1];
        require(p >= 0.0 && p <= 1.0, "PreferenceOracle: probabilities must lie in [0,1]");
        require(std::abs(p + q - 1.0) <= 1e-12,
                "PreferenceOracle: P(y>y') + P(y'>y) must equal 1");
      }
    }
  }
  PreferenceOracle o(Kind::kGeneral, space);
  o.table_ = std::move(probs);
  return o;
}

const RewardTable& PreferenceOracle::latent_reward() const {
  if (!latent_) {
    throw std::invalid_argument("PreferenceOracle: latent reward requires Bradley-Terry");
  }
  return *latent_;
}

double PreferenceOracle::prob(int x, int y1, int y2) const {
  if (kind_ == Kind::kBradleyTerry) {
    return logistic((*latent_)(x, y1) - (*latent_)(x, y2));
  }
  return table_[(x * space_.n_responses + y1) * space_.n_responses + y2];
}

std::vector<double> win_rates(const PreferenceOracle& oracle, const PolicyTable& p_k) {
  check_same_space(oracle.space(), p_k.space(), "win_rates");
  const BanditSpace& space = p_k.space();
  const int Y = space.n_responses;
  std::vector<double> w(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < Y; ++y) {
      long double acc = 0.0L;
      for (int y2 = 0; y2 < Y; ++y2) acc += p_k.prob(x, y2) * oracle.prob(x, y, y2);
      w[x * Y + y] = static_cast<double>(acc);
    }
  }
  return w;
}

// -- SPIN ---------------------------------------------------------------------

double spin_logistic_loss(const PolicyTable& pi, const PolicyTable& p_k,
                          const PolicyTable& p_star, const ContextDistribution& rho,
                          double beta) {
  require(beta > 0.0, "spin_logistic_loss: beta must be positive");
  check_same_space(pi.space(), p_k.space(), "spin_logistic_loss");
  check_same_space(pi.space(), p_star.space(), "spin_logistic_loss");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  long double total = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    std::vector<double> dr(Y);
    for (int y = 0; y < Y; ++y) {
      dr[y] = beta * (std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y)));
    }
    long double ctx = 0.0L;
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        ctx += p_star.prob(x, y) * p_k.prob(x, y2) * softplus(-(dr[y] - dr[y2]));
      }
    }
    total += static_cast<long double>(rho.prob(x)) * ctx;
  }
  return static_cast<double>(total);
}

std::vector<double> spin_logistic_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                           const PolicyTable& p_star,
                                           const ContextDistribution& rho, double beta) {
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  std::vector<double> v(space.cells(), 0.0);
  for (int x = 0; x < space.n_contexts; ++x) {
    std::vector<double> dr(Y);
    for (int y = 0; y < Y; ++y) {
      dr[y] = beta * (std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y)));
    }
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        // d softplus(-(dr_y - dr_y2)) / d dr = -sigmoid(-(dr_y - dr_y2)) e_y
        // + sigmoid(.) e_y2, weighted by pi*(y) pi^k(y2).
        const double w = rho.prob(x) * p_star.prob(x, y) * p_k.prob(x, y2);
        const double s = logistic(-(dr[y] - dr[y2]));
        v[x * Y + y] -= w * beta * s;
        v[x * Y + y2] += w * beta * s;
      }
    }
  }
  return chain_to_logits(pi, v);
}

PolicyTable spin_exact_update(const PolicyTable& p_k, const PolicyTable& p_star, double beta) {
  require(beta > 0.0, "spin_exact_update: beta must be positive");
  check_same_space(p_k.space(), p_star.space(), "spin_exact_update");
  const BanditSpace& space = p_k.space();
  const double a = 1.0 / beta;
  std::vector<double> probs(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(space.n_responses);
    for (int y = 0; y < space.n_responses; ++y) {
      logw[y] = (1.0 - a) * std::log(p_k.prob(x, y)) + a * std::log(p_star.prob(x, y));
      m = std::max(m, logw[y]);
    }
    double sum = 0.0;
    for (int y = 0; y < space.n_responses; ++y) {
      probs[x * space.n_responses + y] = std::exp(logw[y] - m);
      sum += probs[x * space.n_responses + y];
    }
    for (int y = 0; y < space.n_responses; ++y) probs[x * space.n_responses + y] /= sum;
  }
  return PolicyTable::from_probs(space, std::move(probs));
}

PolicyTable linear_spin_update(const PolicyTable& p_k, const PolicyTable& p_star,
                               [[maybe_unused]] const ContextDistribution& rho, double beta,
                               double r_max) {
  const RewardTable r = sign_reward(p_star, p_k, r_max);
  return kl_regularized_update(p_k, r, beta);
}

TrainResult spin_train(double beta, int iterations, const PolicyTable& p_star,
                       const PolicyTable& p_ref, const ContextDistribution& rho,
                       const TrainOptions& opts) {
  require(beta > 0.0, "spin_train: beta must be positive");
  require(iterations >= 1, "spin_train: iterations must be >= 1");
  opts.validate();
  check_same_space(p_star.space(), p_ref.space(), "spin_train");

  TrainResult result;
  IterateHistory& h = result.history;
  h.config.iterations = iterations;
  h.config.beta = beta;
  h.config.zeta = 1.0;
  h.config.r_max = 1.0;
  h.config.link = LinkFunction::kLogistic;
  h.config.regularizer = RegularizerSpec::box(1.0, 0.0);
  h.policies.push_back(p_ref);
  h.kl_to_expert.push_back(expected_kl(rho, p_star, p_ref));

  for (int k = 1; k <= iterations; ++k) {
    const PolicyTable p_k = h.policies.back();
    PolicyTable p_next = descend_logits(
        p_k, opts.inner_steps, opts.lr,
        [&](const PolicyTable& pi) { return spin_logistic_loss(pi, p_k, p_star, rho, beta); },
        [&](const PolicyTable& pi) {
          return spin_logistic_gradient(pi, p_k, p_star, rho, beta);
        },
        "spin_train", k, beta, &result.steps);
    RewardTable dr = reward_mapping(p_next, p_k, beta);
    h.game_values.push_back(game_value(p_k, dr, p_star, rho));
    h.rewards.push_back(std::move(dr));
    h.policies.push_back(std::move(p_next));
    h.kl_to_expert.push_back(expected_kl(rho, p_star, h.policies.back()));
  }
  return result;
}

std::vector<std::tuple<int, double, double>> contraction_check_spin(
    const std::vector<PolicyTable>& history, const PolicyTable& p_star, double beta) {
  require(beta >= 1.0, "contraction_check_spin: contraction regime needs beta >= 1");
  require(history.size() >= 2, "contraction_check_spin: need at least two policies");
  std::vector<std::tuple<int, double, double>> out;
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    const double lhs = uniform_mean_kl(p_star, history[k + 1]);
    const double rhs = (1.0 - 1.0 / beta) * uniform_mean_kl(p_star, history[k]);
    out.emplace_back(static_cast<int>(k), lhs, rhs);
  }
  return out;
}

// -- SPPO ---------------------------------------------------------------------

namespace {

// SPPO fixes the chi^2 weight c = 1; the target is (w - 1/2)/beta.
std::vector<double> sppo_targets(const PreferenceOracle& oracle, const PolicyTable& p_k,
                                 double beta) {
  std::vector<double> t = win_rates(oracle, p_k);
  for (double& v : t) v = (v - 0.5) / beta;
  return t;
}

}  // namespace

double sppo_loss(const PolicyTable& pi, const PolicyTable& p_k, const PreferenceOracle& oracle,
                 const ContextDistribution& rho, double beta) {
  require(beta > 0.0, "sppo_loss: beta must be positive");
  check_same_space(pi.space(), p_k.space(), "sppo_loss");
  check_same_space(pi.space(), oracle.space(), "sppo_loss");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> t = sppo_targets(oracle, p_k, beta);
  long double total = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    long double ctx = 0.0L;
    for (int y = 0; y < Y; ++y) {
      const double u = std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y));
      const double res = u - t[x * Y + y];
      ctx += p_k.prob(x, y) * res * res;
    }
    total += static_cast<long double>(rho.prob(x)) * ctx;
  }
  return static_cast<double>(total);
}

std::vector<double> sppo_loss_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                       const PreferenceOracle& oracle,
                                       const ContextDistribution& rho, double beta) {
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> t = sppo_targets(oracle, p_k, beta);
  std::vector<double> v(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < Y; ++y) {
      const double u = std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y));
      v[x * Y + y] = rho.prob(x) * p_k.prob(x, y) * 2.0 * (u - t[x * Y + y]);
    }
  }
  return chain_to_logits(pi, v);
}

double sppo_ail_objective(const PolicyTable& pi, const PolicyTable& p_k,
                          const PreferenceOracle& oracle, const ContextDistribution& rho,
                          double beta, double c) {
  check_same_space(pi.space(), p_k.space(), "sppo_ail_objective");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> w = win_rates(oracle, p_k);
  long double total = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    long double ctx = 0.0L;
    for (int y = 0; y < Y; ++y) {
      const double dr = beta * (std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y)));
      ctx += p_k.prob(x, y) * ((2.0 * w[x * Y + y] - 1.0) * dr - c * dr * dr);
    }
    total += static_cast<long double>(rho.prob(x)) * ctx;
  }
  return static_cast<double>(total);
}

std::vector<double> sppo_ail_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                      const PreferenceOracle& oracle,
                                      const ContextDistribution& rho, double beta, double c) {
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> w = win_rates(oracle, p_k);
  std::vector<double> v(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    for (int y = 0; y < Y; ++y) {
      const double dr = beta * (std::log(pi.prob(x, y)) - std::log(p_k.prob(x, y)));
      v[x * Y + y] =
          rho.prob(x) * p_k.prob(x, y) * beta * ((2.0 * w[x * Y + y] - 1.0) - 2.0 * c * dr);
    }
  }
  return chain_to_logits(pi, v);
}

PolicyTable sppo_step(const PolicyTable& p_k, const PreferenceOracle& oracle,
                      const ContextDistribution& rho, double beta, int inner_steps,
                      double lr) {
  require(inner_steps > 0 && lr > 0.0, "sppo_step: inner_steps and lr must be positive");
  return descend_logits(
      p_k, inner_steps, lr,
      [&](const PolicyTable& pi) { return sppo_loss(pi, p_k, oracle, rho, beta); },
      [&](const PolicyTable& pi) { return sppo_loss_gradient(pi, p_k, oracle, rho, beta); },
      "sppo_step", 0, beta, nullptr);
}

// -- INPO ---------------------------------------------------------------------

InpoConfig InpoConfig::make(double eta, double tau, PolicyTable p_ref) {
  require(eta > 0.0, "InpoConfig: eta must be positive");
  require(tau > 0.0 && tau <= eta, "InpoConfig: requires 0 < tau <= eta");
  return InpoConfig{eta, tau, std::move(p_ref)};
}

namespace {

// g(y) = log pi(y) - (tau/eta) log pref(y) - ((eta-tau)/eta) log pi^k(y);
// every INPO residual is a difference g(y) - g(y').
std::vector<double> inpo_g(const PolicyTable& pi, const PolicyTable& p_k,
                           const InpoConfig& cfg, int x) {
  const int Y = pi.space().n_responses;
  std::vector<double> g(Y);
  for (int y = 0; y < Y; ++y) {
    g[y] = std::log(pi.prob(x, y)) - (cfg.tau / cfg.eta) * std::log(cfg.p_ref.prob(x, y)) -
           ((cfg.eta - cfg.tau) / cfg.eta) * std::log(p_k.prob(x, y));
  }
  return g;
}

void check_inpo_shapes(const PolicyTable& pi, const PolicyTable& p_k,
                       const PreferenceOracle& oracle, const InpoConfig& cfg,
                       const char* who) {
  check_same_space(pi.space(), p_k.space(), who);
  check_same_space(pi.space(), oracle.space(), who);
  check_same_space(pi.space(), cfg.p_ref.space(), who);
}

}  // namespace

double inpo_paired_loss(const PolicyTable& pi, const PolicyTable& p_k,
                        const PreferenceOracle& oracle, const ContextDistribution& rho,
                        const InpoConfig& config) {
  check_inpo_shapes(pi, p_k, oracle, config, "inpo_paired_loss");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> w = win_rates(oracle, p_k);
  long double total = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    const std::vector<double> g = inpo_g(pi, p_k, config, x);
    long double ctx = 0.0L;
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double res = (g[y] - g[y2]) - (w[x * Y + y] - w[x * Y + y2]) / config.eta;
        ctx += p_k.prob(x, y) * p_k.prob(x, y2) * res * res;
      }
    }
    total += static_cast<long double>(rho.prob(x)) * ctx;
  }
  return static_cast<double>(total);
}

std::vector<double> inpo_paired_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                         const PreferenceOracle& oracle,
                                         const ContextDistribution& rho,
                                         const InpoConfig& config) {
  check_inpo_shapes(pi, p_k, oracle, config, "inpo_paired_gradient");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> w = win_rates(oracle, p_k);
  std::vector<double> v(space.cells(), 0.0);
  for (int x = 0; x < space.n_contexts; ++x) {
    const std::vector<double> g = inpo_g(pi, p_k, config, x);
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double res = (g[y] - g[y2]) - (w[x * Y + y] - w[x * Y + y2]) / config.eta;
        const double common = rho.prob(x) * p_k.prob(x, y) * p_k.prob(x, y2) * 2.0 * res;
        v[x * Y + y] += common;
        v[x * Y + y2] -= common;
      }
    }
  }
  return chain_to_logits(pi, v);
}

double inpo_displayed_loss(const PolicyTable& pi, const PolicyTable& p_k,
                           const PreferenceOracle& oracle, const ContextDistribution& rho,
                           const InpoConfig& config) {
  check_inpo_shapes(pi, p_k, oracle, config, "inpo_displayed_loss");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const double shift = 1.0 / (2.0 * config.eta);
  long double total = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    const std::vector<double> g = inpo_g(pi, p_k, config, x);
    long double ctx = 0.0L;
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double p = oracle.prob(x, y, y2);
        const double h = g[y] - g[y2];
        ctx += p_k.prob(x, y) * p_k.prob(x, y2) *
               (p * (h - shift) * (h - shift) + (1.0 - p) * (-h - shift) * (-h - shift));
      }
    }
    total += static_cast<long double>(rho.prob(x)) * ctx;
  }
  return static_cast<double>(total);
}

std::vector<double> inpo_displayed_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                            const PreferenceOracle& oracle,
                                            const ContextDistribution& rho,
                                            const InpoConfig& config) {
  check_inpo_shapes(pi, p_k, oracle, config, "inpo_displayed_gradient");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const double shift = 1.0 / (2.0 * config.eta);
  std::vector<double> v(space.cells(), 0.0);
  for (int x = 0; x < space.n_contexts; ++x) {
    const std::vector<double> g = inpo_g(pi, p_k, config, x);
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double p = oracle.prob(x, y, y2);
        const double h = g[y] - g[y2];
        // d/dh of p (h - s)^2 + (1-p)(h + s)^2 = 2 (h - (2p - 1) s).
        const double common = rho.prob(x) * p_k.prob(x, y) * p_k.prob(x, y2) * 2.0 *
                              (h - (2.0 * p - 1.0) * shift);
        v[x * Y + y] += common;
        v[x * Y + y2] -= common;
      }
    }
  }
  return chain_to_logits(pi, v);
}

double inpo_ail_objective(const PolicyTable& pi, const PolicyTable& p_k,
                          const PreferenceOracle& oracle, const ContextDistribution& rho,
                          const InpoConfig& config, double c) {
  check_inpo_shapes(pi, p_k, oracle, config, "inpo_ail_objective");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> w = win_rates(oracle, p_k);
  long double total = 0.0L;
  for (int x = 0; x < space.n_contexts; ++x) {
    const std::vector<double> g = inpo_g(pi, p_k, config, x);
    long double ctx = 0.0L;
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double dr = config.eta * (g[y] - g[y2]);
        ctx += p_k.prob(x, y) * p_k.prob(x, y2) *
               ((w[x * Y + y] - w[x * Y + y2]) * dr - 0.5 * c * dr * dr);
      }
    }
    total += static_cast<long double>(rho.prob(x)) * ctx;
  }
  return static_cast<double>(total);
}

std::vector<double> inpo_ail_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                      const PreferenceOracle& oracle,
                                      const ContextDistribution& rho, const InpoConfig& config,
                                      double c) {
  check_inpo_shapes(pi, p_k, oracle, config, "inpo_ail_gradient");
  const BanditSpace& space = pi.space();
  const int Y = space.n_responses;
  const std::vector<double> w = win_rates(oracle, p_k);
  std::vector<double> v(space.cells(), 0.0);
  for (int x = 0; x < space.n_contexts; ++x) {
    const std::vector<double> g = inpo_g(pi, p_k, config, x);
    for (int y = 0; y < Y; ++y) {
      for (int y2 = 0; y2 < Y; ++y2) {
        const double dr = config.eta * (g[y] - g[y2]);
        const double common = rho.prob(x) * p_k.prob(x, y) * p_k.prob(x, y2) * config.eta *
                              ((w[x * Y + y] - w[x * Y + y2]) - c * dr);
        v[x * Y + y] += common;
        v[x * Y + y2] -= common;
      }
    }
  }
  return chain_to_logits(pi, v);
}

PolicyTable inpo_step(const PolicyTable& p_k, const PreferenceOracle& oracle,
                      const ContextDistribution& rho, const InpoConfig& config,
                      int inner_steps, double lr) {
  require(inner_steps > 0 && lr > 0.0, "inpo_step: inner_steps and lr must be positive");
  return descend_logits(
      p_k, inner_steps, lr,
      [&](const PolicyTable& pi) { return inpo_paired_loss(pi, p_k, oracle, rho, config); },
      [&](const PolicyTable& pi) {
        return inpo_paired_gradient(pi, p_k, oracle, rho, config);
      },
      "inpo_step", 0, config.eta, nullptr);
}

// -- Iterative DPO --------------------------------------------------------------

PolicyTable iterative_dpo_step(const PolicyTable& p_k, const PreferenceOracle& oracle,
                               double beta, int y_ref) {
  require(beta > 0.0, "iterative_dpo_step: beta must be positive");
  check_same_space(p_k.space(), oracle.space(), "iterative_dpo_step");
  if (oracle.kind() != PreferenceOracle::Kind::kBradleyTerry) {
    throw std::invalid_argument(
        "iterative_dpo_step: odds-ratio update requires a Bradley-Terry oracle");
  }
  const BanditSpace& space = p_k.space();
  require(y_ref >= 0 && y_ref < space.n_responses, "iterative_dpo_step: y_ref out of range");
  const RewardTable& rstar = oracle.latent_reward();
  std::vector<double> probs(space.cells());
  for (int x = 0; x < space.n_contexts; ++x) {
    // log odds P(y > y_ref)/(1 - P(y > y_ref)) = r*(x,y) - r*(x,y_ref) under BT.
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(space.n_responses);
    for (int y = 0; y < space.n_responses; ++y) {
      logw[y] = std::log(p_k.prob(x, y)) + (rstar(x, y) - rstar(x, y_ref)) / beta;
      m = std::max(m, logw[y]);
    }
    double sum = 0.0;
    for (int y = 0; y < space.n_responses; ++y) {
      probs[x * space.n_responses + y] = std::exp(logw[y] - m);
      sum += probs[x * space.n_responses + y];
    }
    for (int y = 0; y < space.n_responses; ++y) probs[x * space.n_responses + y] /= sum;
  }
  return PolicyTable::from_probs(space, std::move(probs));
}

std::vector<std::tuple<int, double, double>> contraction_check_dpo(
    const std::vector<PolicyTable>& history, const PolicyTable& p_star) {
  require(history.size() >= 2, "contraction_check_dpo: need at least two policies");
  std::vector<std::tuple<int, double, double>> out;
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    const double lhs = uniform_mean_kl(p_star, history[k + 1]);
    const double rhs =
        uniform_mean_kl(p_star, history[k]) - uniform_mean_kl(history[k + 1], history[k]);
    out.emplace_back(static_cast<int>(k), lhs, rhs);
  }
  return out;
}

}  // namespace spbandit
