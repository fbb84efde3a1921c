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

#ifndef SPBANDIT_SPIF_HPP
#define SPBANDIT_SPIF_HPP

#include <cstdint>
#include <vector>

#include "spbandit/game_engine.hpp"

namespace spbandit {

/// Least-squares self-play loss. The square terms push the mapped reward
/// beta log(pi/pi^k) toward r_max_target on expert samples and r_min_target
/// on model samples; the zeta term anchors log(pi/pi^k) near zero.
/// kUnionMixture regularizes (log pi/pi^k)^2 under the equal expert/model
/// mixture; kExpertBeta regularizes (beta log pi/pi^k)^2 under the expert
/// measure alone (the two published forms; kUnionMixture is the algorithm
/// as run and the default).
struct SpifLossSpec {
  enum class RegularizerForm { kUnionMixture, kExpertBeta };

  double beta = 1.0;
  double c = 2.0;
  double alpha = 0.5;
  double zeta = 1e-3;
  RegularizerForm form = RegularizerForm::kUnionMixture;

  static SpifLossSpec make(double beta, double c, double alpha, double zeta,
                           RegularizerForm form = RegularizerForm::kUnionMixture);

  double r_max_target() const { return 1.0 / (2.0 * c * alpha); }
  double r_min_target() const { return -1.0 / (2.0 * c * (1.0 - alpha)); }
};

/// (context, response) pairs drawn from the expert or from a model iterate.
struct SampledDataset {
  enum class Source { kExpert, kModel };
  Source source = Source::kExpert;
  int model_iteration = 0;
  std::vector<std::pair<int, int>> pairs;

  static SampledDataset sample(const PolicyTable& pi, const ContextDistribution& rho,
                               int n, Rng& rng, Source source, int model_iteration = 0);
};

/// Exact loss:
///   alpha E_{rho,pi*}[(dr - r_max)^2] + (1-alpha) E_{rho,pi^k}[(dr - r_min)^2] + reg,
/// with dr = beta log(pi/pi^k) and reg per SpifLossSpec::form.
double spif_loss_exact(const PolicyTable& pi, const PolicyTable& p_k,
                       const PolicyTable& p_star, const ContextDistribution& rho,
                       const SpifLossSpec& spec);

/// Balanced empirical loss over explicit cell weights (each weight table sums
/// to 1): 1/2 sum w*[(dr - r_max)^2] + 1/2 sum wk[(dr - r_min)^2]
/// + zeta/2 sum (w*+wk)/2 [log(pi/pi^k)]^2. The dataset loss and the
/// exact/empirical consistency oracle both route through this.
double spif_loss_weighted(const PolicyTable& pi, const PolicyTable& p_k,
                          const std::vector<double>& weights_star,
                          const std::vector<double>& weights_model,
                          const SpifLossSpec& spec);

/// Dataset averages in place of expectations (balanced 1/2-1/2 weighting).
double spif_loss_sampled(const PolicyTable& pi, const PolicyTable& p_k,
                         const SampledDataset& d_star, const SampledDataset& d_k,
                         const SpifLossSpec& spec);

/// Exact gradient of spif_loss_exact with respect to pi's logits
/// (chain rule through the row softmax). Requires pi to carry logits.
std::vector<double> spif_gradient(const PolicyTable& pi, const PolicyTable& p_k,
                                  const PolicyTable& p_star, const ContextDistribution& rho,
                                  const SpifLossSpec& spec);

struct TrainStep {
  int iteration = 0;
  int inner_step = 0;
  double loss = 0.0;
  double grad_inf_norm = 0.0;
  double max_abs_dr = 0.0;
};

struct TrainResult {
  IterateHistory history;
  std::vector<TrainStep> steps;
};

struct TrainOptions {
  enum class Sampling { kExact, kMonteCarlo };
  int inner_steps = 200;
  double lr = 0.5;
  Sampling sampling = Sampling::kExact;
  int sample_size = 1024;      // Monte-Carlo pairs per dataset per iteration
  std::uint64_t seed = 0;      // Monte-Carlo stream

  void validate() const;
};

/// Self-play training: per iteration, (optionally) sample datasets, run
/// inner_steps of gradient descent on logits warm-started at logits(pi^k),
/// advance pi^{k+1}. Logs per-step loss / gradient norm / max |dr| and the
/// per-iteration mapped-reward tables. Throws NumericalError naming the
/// iteration if the loss leaves the finite range.
TrainResult spif_train(const SpifLossSpec& spec, int iterations, const PolicyTable& p_star,
                       const PolicyTable& p_ref, const ContextDistribution& rho,
                       const TrainOptions& opts);

}  // namespace spbandit

#endif  // SPBANDIT_SPIF_HPP
