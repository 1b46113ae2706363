"""Grid, stencil coefficients and the discrete-equation residual."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sedstore import discretize, levy
from sedstore.discretize import Grid, build, nonlocal_sum, replenishment_min, residual
from sedstore.exact import ActionSet, ControlParams, exact_potential, solve_exact


def make_system(m=50, alpha=0.5, lam=0.2, mu=0.1, action_set=ActionSet.XI2, model=None):
    if model is None:
        model = levy.stable_model(alpha=alpha, lam=lam)
    params = ControlParams(c=0.15, d=0.05, mu=mu, capital_lambda=0.25,
                           action_set=action_set)
    return build(Grid(m), params, model), params, model


class TestGrid:
    def test_basic(self):
        g = Grid(4)
        assert g.h == 0.25
        assert np.allclose(g.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])

    @pytest.mark.parametrize("m", [0, 1, -3])
    def test_too_coarse(self, m):
        with pytest.raises(ValueError):
            Grid(m)


class TestCoefficients:
    def test_first_quadrature_weight_m2(self):
        # lam * (h/2)^{-(1+alpha)} * h at alpha=0.5, lam=0.2, h=0.5:
        # 0.2 * 0.25^{-1.5} * 0.5 = 0.8
        system, _, _ = make_system(m=2)
        assert system.quad_weight[0] == pytest.approx(0.8, rel=1e-13)

    def test_drift_coefficient_m2_node1(self):
        # S(0.5) + compensator = (0.1 + 0.2/0.5) * 0.5^{0.5} = 0.353553...
        system, _, _ = make_system(m=2)
        assert system.drift_coeff[1] == pytest.approx(0.5 * math.sqrt(0.5), rel=1e-12)

    def test_decay_closed_form(self):
        system, _, model = make_system(m=4)
        x = system.grid.nodes[1:]
        expect = model.lam / model.alpha * x ** (-model.alpha)
        assert np.allclose(system.decay_coeff[1:], expect, rtol=1e-13)
        assert math.isnan(system.decay_coeff[0])

    def test_stencil_weight_averages(self):
        system, _, _ = make_system(m=8)
        w = system.quad_weight
        assert system.stencil_weight[0] == pytest.approx(0.5 * w[0])
        assert np.allclose(system.stencil_weight[1:], 0.5 * (w[:-1] + w[1:]))

    @given(alpha=st.floats(min_value=0.1, max_value=0.9),
           lam=st.floats(min_value=0.01, max_value=2.0),
           mu=st.floats(min_value=0.0, max_value=1.0),
           m=st.integers(min_value=2, max_value=40))
    @settings(max_examples=40, deadline=None)
    def test_f_diagonal_positive(self, alpha, lam, mu, m):
        model = levy.stable_model(alpha=alpha, lam=lam)
        params = ControlParams(c=0.15, d=0.05, mu=mu, capital_lambda=0.25,
                               action_set=ActionSet.XI2)
        system = build(Grid(m), params, model)
        assert np.all(system.f_diag[1:] > 0.0)


class TestNonlocalSum:
    @given(a=st.floats(min_value=-5, max_value=5), b=st.floats(min_value=-5, max_value=5),
           i=st.integers(min_value=1, max_value=30))
    @settings(max_examples=60, deadline=None)
    def test_kills_affine(self, a, b, i):
        """Constant and linear inputs are annihilated exactly: the stencil
        average sits at the same abscissa the cross term differences to."""
        system, _, _ = make_system(m=30)
        phi = a + b * system.grid.nodes
        assert nonlocal_sum(system, i, phi) == pytest.approx(0.0, abs=1e-12 * (abs(a) + abs(b) + 1))

    def test_rejects_node_zero(self):
        system, _, _ = make_system(m=10)
        with pytest.raises(ValueError):
            nonlocal_sum(system, 0, np.zeros(11))

    def test_quadrature_oracle_on_smooth_input(self):
        """Against adaptive quadrature of the same integrand (discrete slope
        kept, so only the midpoint-cell approximation differs).  quad gets
        the interpolation kinks as breakpoints, which puts its own error at
        machine precision."""
        system, _, model = make_system(m=200)
        g = system.grid
        phi = np.cos(3.0 * g.nodes)  # smooth, non-polynomial
        for i in (40, 120, 200):
            x = g.nodes[i]
            slope = (phi[i] - phi[i - 1]) / g.h

            def integrand(z):
                return ((phi[i] - np.interp(x - z, g.nodes, phi) - z * slope)
                        * levy.density(model, z))

            oracle, err = quad(integrand, 0.0, x, epsabs=1e-11, epsrel=1e-11,
                               limit=4 * i, points=np.arange(1, i) * g.h)
            assert err < 1e-10
            assert nonlocal_sum(system, i, phi) == pytest.approx(oracle, rel=2e-3, abs=1e-6)


class TestReplenishmentMin:
    def test_xi1_full_node_only_inaction(self):
        system, _, _ = make_system(m=10, action_set=ActionSet.XI1)
        phi = -np.linspace(0.0, 1.0, 11)
        value, k = replenishment_min(system, 10, phi)
        assert (value, k) == (phi[10], 0)

    def test_xi2_origin_inaction_when_costly(self):
        system, _, _ = make_system(m=10)
        phi = np.zeros(11)  # phi_M + c + d = 0.2 >= 0
        assert replenishment_min(system, 0, phi) == (0.0, 0)

    def test_xi2_origin_acts_on_exact_potential(self, half_stable, table_params):
        """phi_M = -1.131..., so refilling beats waiting: value = phi_M + c + d."""
        sol = solve_exact(half_stable, table_params)
        system, _, _ = make_system(m=10)
        phi = exact_potential(system.grid.nodes, sol)
        value, k = replenishment_min(system, 0, phi)
        assert k == 10
        assert value == pytest.approx(phi[10] + 0.2, rel=1e-13)
        assert value == pytest.approx(-0.931, abs=5e-4)

    def test_value_never_above_current(self):
        system, _, _ = make_system(m=20, action_set=ActionSet.XI1)
        rng = np.random.default_rng(5)
        phi = -np.sort(rng.uniform(0.0, 2.0, 21))
        phi[0] = 0.0
        for i in range(21):
            value, _ = replenishment_min(system, i, phi)
            assert value <= phi[i]


class TestResidual:
    def test_zero_potential_unit_hamiltonian(self):
        """phi == 0, H = 1, Xi2: node 0 balances, rows i >= 1 are off by 1."""
        system, _, _ = make_system(m=6)
        assert residual(system, np.zeros(7), 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_requires_normalized_phi(self):
        system, _, _ = make_system(m=6)
        with pytest.raises(ValueError):
            residual(system, np.ones(7), 1.0)

    def test_sampled_closed_form_is_no_discrete_solution(self, half_stable, table_params):
        """Sampling the closed form does NOT satisfy the discrete equations:
        the x^alpha corner at 0 is self-similar, so the row residual next to
        it is exactly resolution-independent (every term in row 1 scales as
        h^0 on a pure power).  Solver output is the only H/Phi pair with a
        small residual; this pins the distinction."""
        sol = solve_exact(half_stable, table_params)
        res = []
        for m in (100, 200, 400):
            system, _, _ = make_system(m=m)
            phi = exact_potential(system.grid.nodes, sol)
            res.append(residual(system, phi, sol.h_hat))
        assert 0.05 < res[0] < 1.0
        assert res[1] == pytest.approx(res[0], rel=1e-10)
        assert res[2] == pytest.approx(res[0], rel=1e-10)


class TestTemperedBuild:
    def test_decay_matches_quadrature(self):
        model = levy.tempered_model(alpha=0.5, lam=0.2, tempering=2.0)
        system, _, _ = make_system(m=200, model=model)
        for i in (10, 100, 200):
            x = system.grid.nodes[i]
            oracle, _ = quad(lambda z: levy.density(model, z), x, np.inf,
                             epsabs=1e-12, epsrel=1e-12, limit=400)
            assert system.decay_coeff[i] == pytest.approx(oracle, rel=5e-3)

    def test_compensator_refines_toward_quadrature(self):
        """The small-jump compensator is a midpoint prefix sum, so it carries
        an O(sqrt(h)) first-cell deficit against int_0^x z*nu(dz); check the
        deficit is small and halves when h drops by 4x."""
        model = levy.tempered_model(alpha=0.5, lam=0.2, tempering=2.0)
        for x in (0.5, 1.0):
            oracle, _ = quad(lambda z: z * levy.density(model, z), 0.0, x,
                             epsabs=1e-12, epsrel=1e-12, limit=400)
            deficits = []
            for m in (200, 800):
                system, params, _ = make_system(m=m, model=model)
                i = int(round(x * m))
                drift_part = params.mu * x ** (1.0 - model.alpha)
                deficits.append(oracle - (system.drift_coeff[i] - drift_part))
            assert 0.0 < deficits[0] < 0.02
            assert deficits[1] == pytest.approx(0.5 * deficits[0], rel=0.15)

    def test_tempering_shrinks_coefficients(self):
        plain, _, _ = make_system(m=50)
        damped, _, _ = make_system(
            m=50, model=levy.tempered_model(alpha=0.5, lam=0.2, tempering=2.0))
        assert np.all(damped.decay_coeff[1:] < plain.decay_coeff[1:])
        assert np.all(damped.quad_weight <= plain.quad_weight)
