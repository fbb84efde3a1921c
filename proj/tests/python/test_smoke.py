# Copyright 2026 The spbandit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

import spbandit as sb


@pytest.fixture
def small_instance():
    space = sb.BanditSpace(2, 4)
    rho = sb.ContextDistribution.uniform(space)
    p_star = sb.random_policy(space, 0.5, 7)
    p_ref = sb.PolicyTable.uniform(space)
    return space, rho, p_star, p_ref


def test_random_policy_is_deterministic():
    space = sb.BanditSpace(3, 4)
    a = sb.random_policy(space, 1.0, 42)
    b = sb.random_policy(space, 1.0, 42)
    assert a.probs() == b.probs()
    assert all(abs(sum(a.probs()[x * 4:(x + 1) * 4]) - 1.0) < 1e-12 for x in range(3))


def test_closed_form_reward_matches_formula():
    space = sb.BanditSpace(1, 2)
    p_star = sb.PolicyTable.from_probs(space, [0.8, 0.2])
    p = sb.PolicyTable.from_probs(space, [0.2, 0.8])
    reward = sb.optimal_mixed_chi2_reward(p_star, p, 0.5)
    assert reward.values[0] == pytest.approx(1.2, abs=1e-12)
    assert reward.values[1] == pytest.approx(-1.2, abs=1e-12)

    rho = sb.ContextDistribution.uniform(space)
    div = sb.divergence(sb.DivergenceKind.mixed_chi2(0.5, 0.5), p_star, p, rho)
    assert div == pytest.approx(0.72, abs=1e-10)


def test_kl_update_round_trip(small_instance):
    space, rho, p_star, p_ref = small_instance
    dr = sb.reward_mapping(p_star, p_ref, 1.5)
    back = sb.kl_regularized_update(p_ref, dr, 1.5)
    assert back.probs() == pytest.approx(p_star.probs(), abs=1e-10)


def test_selfplay_game_and_duality_gap(small_instance):
    space, rho, p_star, p_ref = small_instance
    config = sb.GameConfig(iterations=64, beta=4.0, zeta=2.0, r_max=1.0,
                           regularizer=sb.RegularizerSpec.box(1.0, 2.0))
    history = sb.run_selfplay(config, p_star, p_ref, rho)
    assert len(history.policies) == 65
    assert history.kl_to_expert[-1] < history.kl_to_expert[0]
    report = sb.duality_gap(history, p_star, rho, 1.0)
    assert report.gap >= -1e-9


def test_spif_training_improves_tv_and_keeps_reward_bounded(small_instance):
    space, rho, p_star, p_ref = small_instance
    spec = sb.SpifLossSpec.make(beta=1.0, c=2.0, alpha=0.5, zeta=1e-3)
    result = sb.spif_train(spec, 3, p_star, p_ref, rho,
                           sb.TrainOptions(inner_steps=150, lr=0.5))
    assert sb.expected_tv(rho, result.history.policies[-1], p_star) < \
        sb.expected_tv(rho, result.history.policies[0], p_star)
    assert max(step.max_abs_dr for step in result.steps) <= 0.55


def test_spin_exact_update_contracts():
    space = sb.BanditSpace(1, 2)
    p_star = sb.PolicyTable.from_probs(space, [0.9, 0.1])
    p_k = sb.PolicyTable.from_probs(space, [0.5, 0.5])
    updated = sb.spin_exact_update(p_k, p_star, 2.0)
    assert updated.probs() == pytest.approx([0.75, 0.25], abs=1e-12)
    checks = sb.contraction_check_spin([p_k, updated], p_star, 2.0)
    k, lhs, rhs = checks[0]
    assert lhs <= rhs + 1e-10


def test_run_experiments_writes_summary(tmp_path):
    config = {"kind": "game", "contexts": 2, "responses": 3, "seeds": [0],
              "iterations": 8}
    summary = json.loads(sb.run_experiments(json.dumps(config), str(tmp_path)))
    assert (tmp_path / "game_seed0.csv").exists()
    assert (tmp_path / "summary.json").exists()
    assert summary["runs"][0]["name"] == "game_seed0"


def test_rate_fit_recovers_power_law():
    gaps = [(k, 7.0 / math.sqrt(k)) for k in (16, 64, 256, 1024)]
    exponent, constant = sb.rate_fit(gaps)
    assert exponent == pytest.approx(0.5, abs=1e-6)
    assert constant == pytest.approx(7.0, abs=1e-6)
