"""Path simulator: dynamics, sampling law, policies, reproducibility."""
import math

import numpy as np
import pytest

from sedstore import levy
from sedstore.discretize import Grid
from sedstore.exact import ActionSet, ControlParams, solve_exact
from sedstore.paths import (
    PathConfig,
    exact_policy_fn,
    null_policy,
    simulate,
    stable_increment,
    step,
    table_policy,
)


def make_params(c=0.15, d=0.05, capital_lambda=0.25):
    return ControlParams(c=c, d=d, mu=0.1, capital_lambda=capital_lambda,
                         action_set=ActionSet.XI2)


class TestStep:
    def test_pure_drift_hand_value(self):
        # (0.25^0.5 - 0.1*0.5*0.01)^2 with alpha = 1/2
        assert step(0.25, 0.01, 0.0, mu=0.1, alpha=0.5) == pytest.approx(
            0.24950025, abs=1e-15)

    def test_zero_is_absorbing_for_drift_and_jumps(self):
        assert step(0.0, 0.01, 0.0, mu=0.1, alpha=0.5) == 0.0
        assert step(0.0, 0.01, 0.7, mu=0.1, alpha=0.5) == 0.0

    def test_drift_floors_at_zero(self):
        assert step(1e-6, 10.0, 0.0, mu=0.5, alpha=0.5) == 0.0

    def test_jump_larger_than_state_truncates(self):
        assert step(0.3, 0.01, 5.0, mu=0.1, alpha=0.5) == 0.0

    def test_vectorized_matches_scalar(self):
        xs = np.array([0.0, 0.25, 0.9])
        out = step(xs, 0.01, 0.1, mu=0.1, alpha=0.5)
        expected = [step(float(x), 0.01, 0.1, mu=0.1, alpha=0.5) for x in xs]
        assert np.allclose(out, expected, atol=1e-15)


class TestStableIncrement:
    def test_rejects_tempered_model(self):
        model = levy.tempered_model(alpha=0.5, lam=0.2, tempering=2.0)
        with pytest.raises(ValueError):
            stable_increment(model, 0.01, np.random.default_rng(0))

    def test_positive_and_reproducible(self, half_stable):
        draws = stable_increment(half_stable, 0.01, np.random.default_rng(7), size=1000)
        again = stable_increment(half_stable, 0.01, np.random.default_rng(7), size=1000)
        assert np.all(draws > 0.0)
        assert np.array_equal(draws, again)

    def test_scalar_mode(self, half_stable):
        value = stable_increment(half_stable, 0.01, np.random.default_rng(3))
        assert isinstance(value, float) and value > 0.0

    @pytest.mark.parametrize("u", [1.0, 5.0])
    def test_laplace_transform(self, u, half_stable):
        """E[exp(-u*Inc)] has the subordinator's closed form."""
        dt = 0.01
        n = 200_000
        draws = stable_increment(half_stable, dt, np.random.default_rng(42), size=n)
        emp = np.exp(-u * draws)
        target = math.exp(-dt * half_stable.lam * math.gamma(0.5) / 0.5 * u**0.5)
        z = (emp.mean() - target) / (emp.std(ddof=1) / math.sqrt(n))
        assert abs(z) < 4.0


class TestPathConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(horizon=0.0), dict(horizon=math.inf), dict(x0=-0.1), dict(x0=1.5),
        dict(n_paths=0), dict(dt=0.0), dict(dt=-0.01),
    ])
    def test_rejects_bad_fields(self, kwargs):
        base = dict(horizon=10.0, x0=0.5, n_paths=2, master_seed=0, dt=0.01)
        base.update(kwargs)
        with pytest.raises(ValueError):
            PathConfig(**base)


class TestPolicies:
    def test_null_policy_is_zero(self):
        assert np.all(null_policy(np.linspace(0, 1, 11)) == 0.0)

    def test_exact_policy_acts_only_when_depleted(self, half_stable):
        sol = solve_exact(half_stable, make_params())
        policy = exact_policy_fn(sol.kappa, make_params())
        xs = np.array([0.0, 0.0, 0.3, 1.0])
        assert np.array_equal(policy(xs), [1.0, 1.0, 0.0, 0.0])

    def test_exact_policy_silent_when_cost_exceeds_kappa(self, half_stable):
        params = make_params(c=3.0, d=1.0)
        sol = solve_exact(half_stable, params)
        policy = exact_policy_fn(sol.kappa, params)
        assert np.all(policy(np.array([0.0, 0.5])) == 0.0)

    def test_table_policy_nearest_node_refills_to_full(self):
        grid = Grid(10)
        eta = np.where(grid.nodes <= 0.3, 1.0 - grid.nodes, 0.0)
        policy = table_policy(eta, grid)
        # 0.26 rounds to node 3 (acting), 0.26 refills by 1 - 0.26
        assert policy(np.array([0.26]))[0] == pytest.approx(0.74)
        assert policy(np.array([0.36]))[0] == 0.0

    def test_negative_policy_output_rejected(self, half_stable):
        # horizon long enough that the observation clock certainly fires
        cfg = PathConfig(horizon=100.0, x0=0.5, n_paths=1, master_seed=0, dt=0.01)
        with pytest.raises(ValueError, match="negative"):
            simulate(make_params(), half_stable, lambda x: -np.ones_like(x), cfg)


class TestSimulate:
    def test_coarse_step_warns(self, half_stable):
        cfg = PathConfig(horizon=2.0, x0=0.5, n_paths=1, master_seed=0, dt=0.5)
        with pytest.warns(RuntimeWarning, match="poorly resolved"):
            simulate(make_params(), half_stable, null_policy, cfg)

    def test_bit_reproducible(self, half_stable):
        cfg = PathConfig(horizon=20.0, x0=1.0, n_paths=3, master_seed=11, dt=0.01)
        a = simulate(make_params(), half_stable, null_policy, cfg)
        b = simulate(make_params(), half_stable, null_policy, cfg)
        assert a == b

    def test_seed_changes_outcome(self, half_stable):
        base = dict(horizon=20.0, x0=1.0, n_paths=3, dt=0.01)
        a = simulate(make_params(), half_stable, null_policy,
                     PathConfig(master_seed=1, **base))
        b = simulate(make_params(), half_stable, null_policy,
                     PathConfig(master_seed=2, **base))
        assert a.ergodic_cost_mean != b.ergodic_cost_mean

    def test_uncontrolled_depleted_start_costs_exactly_one(self, half_stable):
        cfg = PathConfig(horizon=5.0, x0=0.0, n_paths=2, master_seed=0, dt=0.01)
        stats = simulate(make_params(), half_stable, null_policy, cfg)
        assert stats.occupation_zero_fraction == 1.0
        assert stats.ergodic_cost_mean == 1.0
        assert stats.replenish_count_rate == 0.0

    def test_record_path_reconciles_with_stats(self, half_stable):
        params = make_params()
        sol = solve_exact(half_stable, params)
        policy = exact_policy_fn(sol.kappa, params)
        cfg = PathConfig(horizon=50.0, x0=1.0, n_paths=1, master_seed=5, dt=0.01)
        stats, rows = simulate(params, half_stable, policy, cfg, record_path=True)
        assert simulate(params, half_stable, policy, cfg) == stats
        total = sum(r[3] for r in rows)
        assert total / cfg.horizon == pytest.approx(stats.ergodic_cost_mean, abs=1e-12)
        assert {r[2] for r in rows} <= {"drift", "jump", "observe"}
        xs = np.array([r[1] for r in rows])
        assert np.all(xs >= 0.0) and np.all(xs <= 1.0)

    def test_exact_policy_tracks_closed_form_cost(self, half_stable):
        params = make_params()
        sol = solve_exact(half_stable, params)
        policy = exact_policy_fn(sol.kappa, params)
        cfg = PathConfig(horizon=200.0, x0=1.0, n_paths=64, master_seed=99, dt=0.02)
        stats = simulate(params, half_stable, policy, cfg)
        z = (stats.ergodic_cost_mean - sol.h_hat) / stats.ergodic_cost_stderr
        assert abs(z) < 5.0
