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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spbandit/divergences.hpp"
#include "spbandit/experiments.hpp"
#include "spbandit/verify.hpp"

namespace py = pybind11;

using namespace spbandit;

PYBIND11_MODULE(spbandit, m) {
  m.doc() = "Tabular self-play imitation laboratory";
  m.attr("__version__") = kVersion;

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<BanditSpace>(m, "BanditSpace")
      .def(py::init<int, int>(), py::arg("contexts"), py::arg("responses"))
      .def_readonly("contexts", &BanditSpace::n_contexts)
      .def_readonly("responses", &BanditSpace::n_responses);

  py::class_<ContextDistribution>(m, "ContextDistribution")
      .def(py::init<BanditSpace, std::vector<double>>(), py::arg("space"), py::arg("probs"))
      .def_static("uniform", &ContextDistribution::uniform)
      .def("probs", &ContextDistribution::probs);

  py::class_<PolicyTable>(m, "PolicyTable")
      .def_static("uniform", &PolicyTable::uniform)
      .def_static("from_probs", &PolicyTable::from_probs)
      .def_static("from_logits", &PolicyTable::from_logits)
      .def("prob", &PolicyTable::prob)
      .def("probs", &PolicyTable::probs)
      .def("has_logits", &PolicyTable::has_logits)
      .def_property_readonly("space", &PolicyTable::space);

  py::class_<RewardTable>(m, "RewardTable")
      .def_static("zeros", &RewardTable::zeros)
      .def_static("boxed", &RewardTable::boxed)
      .def_readonly("values", &RewardTable::values)
      .def_readonly("r_max_bound", &RewardTable::r_max_bound)
      .def("max_abs", &RewardTable::max_abs);

  py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

  m.def("random_policy",
        py::overload_cast<const BanditSpace&, double, std::uint64_t>(&random_policy),
        py::arg("space"), py::arg("concentration"), py::arg("seed"));
  m.def("expected_value", &expected_value);
  m.def("sample_response",
        [](const PolicyTable& pi, int x, Rng& rng) { return sample_response(pi, x, rng); });
  m.def("expected_kl", &expected_kl);
  m.def("expected_tv", &expected_tv);

  py::class_<DivergenceKind>(m, "DivergenceKind")
      .def_static("tv", &DivergenceKind::tv)
      .def_static("kl", &DivergenceKind::kl)
      .def_static("chi2", &DivergenceKind::chi2)
      .def_static("mixed_chi2", &DivergenceKind::mixed_chi2, py::arg("alpha"), py::arg("c"));
  m.def("divergence", &divergence);
  m.def("optimal_mixed_chi2_reward", &optimal_mixed_chi2_reward);
  m.def("variational_value", &variational_value);
  m.def("brute_force_variational_max", &brute_force_variational_max);

  py::enum_<LinkFunction>(m, "LinkFunction")
      .value("identity", LinkFunction::kIdentity)
      .value("logistic", LinkFunction::kLogistic);

  py::class_<RegularizerSpec>(m, "RegularizerSpec")
      .def_static("box", &RegularizerSpec::box, py::arg("r_max"), py::arg("zeta"))
      .def_static("mixed_quadratic", &RegularizerSpec::mixed_quadratic, py::arg("c"),
                  py::arg("alpha"), py::arg("zeta"));
  m.def("reward_objective", &reward_objective);
  m.def("omd_reward_step", &omd_reward_step);
  m.def("proximal_mixed_reward_step", &proximal_mixed_reward_step);
  m.def("sign_reward", &sign_reward);

  m.def("kl_regularized_update", &kl_regularized_update);
  m.def("log_partition", &log_partition);
  m.def("reward_mapping", &reward_mapping);
  m.def("one_step_descent_check", &one_step_descent_check);

  py::enum_<GameConfig::Mode>(m, "GameMode")
      .value("unmapped", GameConfig::Mode::kUnmapped)
      .value("mapped_delta_r", GameConfig::Mode::kMappedDeltaR);

  py::class_<GameConfig>(m, "GameConfig")
      .def(py::init([](int iterations, double beta, double zeta, double r_max,
                       LinkFunction link, RegularizerSpec reg, GameConfig::Mode mode) {
             GameConfig g;
             g.iterations = iterations;
             g.beta = beta;
             g.zeta = zeta;
             g.r_max = r_max;
             g.link = link;
             g.regularizer = reg;
             g.mode = mode;
             g.validate();
             return g;
           }),
           py::arg("iterations"), py::arg("beta"), py::arg("zeta"), py::arg("r_max") = 1.0,
           py::arg("link") = LinkFunction::kIdentity,
           py::arg("regularizer") = RegularizerSpec::box(1.0, 1.0),
           py::arg("mode") = GameConfig::Mode::kUnmapped);

  py::class_<IterateHistory>(m, "IterateHistory")
      .def_readonly("policies", &IterateHistory::policies)
      .def_readonly("rewards", &IterateHistory::rewards)
      .def_readonly("game_values", &IterateHistory::game_values)
      .def_readonly("kl_to_expert", &IterateHistory::kl_to_expert);

  py::class_<DualityGapReport>(m, "DualityGapReport")
      .def_readonly("gap", &DualityGapReport::gap)
      .def_readonly("avg_policy", &DualityGapReport::avg_policy)
      .def_readonly("avg_reward", &DualityGapReport::avg_reward)
      .def_readonly("d_const", &DualityGapReport::d_const)
      .def_readonly("b_const", &DualityGapReport::b_const)
      .def_readonly("b_available", &DualityGapReport::b_available)
      .def_readonly("bound_value", &DualityGapReport::bound_value);

  m.def("game_value", &game_value);
  m.def("run_selfplay", &run_selfplay);
  m.def("duality_gap", &duality_gap);
  m.def("rate_fit", &rate_fit);

  py::enum_<SpifLossSpec::RegularizerForm>(m, "SpifRegularizerForm")
      .value("union_mixture", SpifLossSpec::RegularizerForm::kUnionMixture)
      .value("expert_beta", SpifLossSpec::RegularizerForm::kExpertBeta);

  py::class_<SpifLossSpec>(m, "SpifLossSpec")
      .def_static("make", &SpifLossSpec::make, py::arg("beta"), py::arg("c"), py::arg("alpha"),
                  py::arg("zeta"),
                  py::arg("form") = SpifLossSpec::RegularizerForm::kUnionMixture)
      .def_readonly("beta", &SpifLossSpec::beta)
      .def_readonly("c", &SpifLossSpec::c)
      .def_readonly("alpha", &SpifLossSpec::alpha)
      .def_readonly("zeta", &SpifLossSpec::zeta)
      .def_property_readonly("r_max_target", &SpifLossSpec::r_max_target)
      .def_property_readonly("r_min_target", &SpifLossSpec::r_min_target);

  py::enum_<TrainOptions::Sampling>(m, "Sampling")
      .value("exact", TrainOptions::Sampling::kExact)
      .value("monte_carlo", TrainOptions::Sampling::kMonteCarlo);

  py::class_<TrainOptions>(m, "TrainOptions")
      .def(py::init([](int inner_steps, double lr, TrainOptions::Sampling sampling,
                       int sample_size, std::uint64_t seed) {
             TrainOptions o{inner_steps, lr, sampling, sample_size, seed};
             o.validate();
             return o;
           }),
           py::arg("inner_steps") = 200, py::arg("lr") = 0.5,
           py::arg("sampling") = TrainOptions::Sampling::kExact,
           py::arg("sample_size") = 1024, py::arg("seed") = 0);

  py::class_<TrainStep>(m, "TrainStep")
      .def_readonly("iteration", &TrainStep::iteration)
      .def_readonly("inner_step", &TrainStep::inner_step)
      .def_readonly("loss", &TrainStep::loss)
      .def_readonly("grad_inf_norm", &TrainStep::grad_inf_norm)
      .def_readonly("max_abs_dr", &TrainStep::max_abs_dr);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("history", &TrainResult::history)
      .def_readonly("steps", &TrainResult::steps);

  m.def("spif_loss_exact", &spif_loss_exact);
  m.def("spif_loss_weighted", &spif_loss_weighted);
  m.def("spif_gradient", &spif_gradient);
  m.def("spif_train", &spif_train, py::arg("spec"), py::arg("iterations"), py::arg("p_star"),
        py::arg("p_ref"), py::arg("rho"), py::arg("opts") = TrainOptions{});

  py::class_<PreferenceOracle>(m, "PreferenceOracle")
      .def_static("bradley_terry", &PreferenceOracle::bradley_terry)
      .def_static("general", &PreferenceOracle::general)
      .def("prob", &PreferenceOracle::prob);
  m.def("win_rates", &win_rates);
  m.def("spin_logistic_loss", &spin_logistic_loss);
  m.def("spin_exact_update", &spin_exact_update);
  m.def("linear_spin_update", &linear_spin_update);
  m.def("spin_train", &spin_train, py::arg("beta"), py::arg("iterations"), py::arg("p_star"),
        py::arg("p_ref"), py::arg("rho"), py::arg("opts") = TrainOptions{});
  m.def("contraction_check_spin", &contraction_check_spin);
  m.def("sppo_step", &sppo_step);
  py::class_<InpoConfig>(m, "InpoConfig")
      .def_static("make", &InpoConfig::make, py::arg("eta"), py::arg("tau"), py::arg("p_ref"));
  m.def("inpo_step", &inpo_step);
  m.def("iterative_dpo_step", &iterative_dpo_step, py::arg("p_k"), py::arg("oracle"),
        py::arg("beta"), py::arg("y_ref") = 0);
  m.def("contraction_check_dpo", &contraction_check_dpo);

  m.def(
      "run_experiments",
      [](const std::string& config_json, const std::string& out_dir, int threads) {
        const RunConfig config = RunConfig::from_json(nlohmann::json::parse(config_json));
        return run_experiments(config, out_dir, threads).dump();
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("threads") = 1);

  py::class_<CriterionResult>(m, "CriterionResult")
      .def_readonly("id", &CriterionResult::id)
      .def_readonly("name", &CriterionResult::name)
      .def_readonly("pass_", &CriterionResult::pass)
      .def_readonly("detail", &CriterionResult::detail);
  m.def("run_verification", &run_verification);
}
