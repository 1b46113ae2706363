"""Relaxed Gauss-Seidel fast sweep for the discretized ergodic equation.

H and Phi are computed simultaneously: each outer iteration first updates H
from the node-0 equation using the latest Phi, then sweeps i = 1..M updating

    Phi_i <- R*Phi_i + (1-R) * (G_i - H) / F_i

with newest-available Phi entries on the right-hand side (true Gauss-Seidel;
the sweep direction follows the leftward drift).  Iteration stops when both
max|dPhi| < tol_phi and |dH| < tol_h hold.  Neither pseudo-time integration
nor a vanishing discount is involved.

The inner loop exists twice with identical semantics: a plain-Python
reference and a numba-compiled kernel picked automatically when numba is
importable (the sweep is O(M^2) per iteration and iteration counts grow with
M, so fine grids benefit by ~50x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import discretize
from .discretize import DiscretizedSystem, Grid, replenishment_min
from .exact import ActionSet

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None


@dataclass(frozen=True)
class SweepConfig:
    """Solver knobs.

    relaxation: R in (0, 1); 0 rejects (the undamped iteration can diverge).
    tol_phi / tol_h: termination thresholds on max|dPhi| and |dH|.
    max_iters: outer-iteration cap before declaring non-convergence.
    initial_guess: optional starting Phi (length M+1, entry 0 must be 0);
        zero-filled when absent.
    """

    relaxation: float = 0.5
    tol_phi: float = 1e-10
    tol_h: float = 1e-10
    max_iters: int = 10**6
    initial_guess: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (0.0 < self.relaxation < 1.0):
            raise ValueError(f"relaxation must lie in (0,1), got {self.relaxation}")
        if self.tol_phi <= 0.0 or self.tol_h <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class DiscreteSolution:
    """Converged output of one solve.

    h_value: effective Hamiltonian H.
    phi: potential on the nodes, phi[0] = 0.
    eta_star: optimal refill amount per node (h * k_star).
    a_star: worst-case intensity distortion per node (robust runs; else None).
    iters: outer iterations used.
    final_residual: max row residual of the discretized equation.
    """

    h_value: float
    phi: np.ndarray
    eta_star: np.ndarray
    a_star: np.ndarray | None
    iters: int
    final_residual: float


class NonConvergenceError(RuntimeError):
    """Raised when the sweep hits max_iters; carries last-iterate diagnostics."""

    def __init__(self, iters, delta_phi, delta_h, h_value, residual):
        self.iters = iters
        self.delta_phi = delta_phi
        self.delta_h = delta_h
        self.h_value = h_value
        self.residual = residual
        super().__init__(
            f"sweep did not converge in {iters} iterations "
            f"(max|dPhi|={delta_phi:.3e}, |dH|={delta_h:.3e}, "
            f"H={h_value:.12f}, residual={residual:.3e})"
        )


class ThresholdStructureError(RuntimeError):
    """Action region is not a contiguous prefix [0, x_bar] of the grid."""


def _iterate_python(
    phi, relax, tol_phi, tol_h, max_iters, lam_obs, c_plus_d,
    xi1, full_cost, d_over_h, zc_over_h, f_diag, q_coef, gamma,
):
    """Reference sweep loop; phi is updated in place.

    gamma <= 0 runs the neutral replenishment term, gamma > 0 the robust
    exponential one.  Returns (h_value, iters, delta_phi, delta_h, converged).

    Termination needs the delta conjunction AND a residual check: iterate
    deltas scale like residual / F_i, and F_i grows with the grid (drift/h),
    so stopping on deltas alone leaves a residual ~ tol_phi * max F_i.  When
    the delta test passes but the residual still exceeds 100 * tol_phi, the
    working tolerances shrink proportionally and sweeping continues.
    """
    m = phi.shape[0] - 1
    one_minus = 1.0 - relax
    h_value = math.nan
    delta_h = math.inf
    delta_phi = math.inf
    resid_target = 100.0 * tol_phi
    eff_tol_phi = tol_phi
    eff_tol_h = tol_h
    for it in range(1, max_iters + 1):
        m0 = min(0.0, phi[m] + c_plus_d)
        if gamma > 0.0:
            h_new = 1.0 + lam_obs / gamma * math.expm1(gamma * m0)
        else:
            h_new = 1.0 + lam_obs * m0
        delta_h = abs(h_new - h_value) if it > 1 else math.inf
        h_value = h_new

        delta_phi = 0.0
        for i in range(1, m + 1):
            cur = phi[i]
            if xi1 and i < m:
                cand = phi[m] + full_cost[i]
                m_i = cand if cand < cur else cur
            else:
                m_i = cur  # only k = 0 is admissible
            avg = 0.0
            for n in range(1, i + 1):
                avg += q_coef[i - n] * phi[n]
            g = d_over_h[i] * phi[i - 1] + avg + zc_over_h[i] * (cur - phi[i - 1])
            if gamma > 0.0:
                g += lam_obs * cur + lam_obs / gamma * math.expm1(-gamma * (cur - m_i))
            else:
                g += lam_obs * m_i
            new = relax * cur + one_minus * (g - h_value) / f_diag[i]
            diff = abs(new - cur)
            if diff > delta_phi:
                delta_phi = diff
            phi[i] = new

        if delta_phi < eff_tol_phi and delta_h < eff_tol_h:
            # Non-mutating residual pass over the settled iterate.
            resid = abs(h_value - 1.0 - (lam_obs / gamma * math.expm1(gamma * min(0.0, phi[m] + c_plus_d)) if gamma > 0.0 else lam_obs * min(0.0, phi[m] + c_plus_d)))
            for i in range(1, m + 1):
                cur = phi[i]
                if xi1 and i < m:
                    cand = phi[m] + full_cost[i]
                    m_i = cand if cand < cur else cur
                else:
                    m_i = cur
                avg = 0.0
                for n in range(1, i + 1):
                    avg += q_coef[i - n] * phi[n]
                g = d_over_h[i] * phi[i - 1] + avg + zc_over_h[i] * (cur - phi[i - 1])
                if gamma > 0.0:
                    g += lam_obs * cur + lam_obs / gamma * math.expm1(-gamma * (cur - m_i))
                else:
                    g += lam_obs * m_i
                row = abs(f_diag[i] * cur + h_value - g)
                if row > resid:
                    resid = row
            if resid < resid_target:
                return h_value, it, delta_phi, delta_h, True
            # Residual scales with the working tolerance; tighten and go on.
            shrink = 0.4 * resid_target / resid
            eff_tol_phi *= shrink
            eff_tol_h *= shrink
    return h_value, max_iters, delta_phi, delta_h, False


if numba is not None:
    _iterate_fast = numba.njit(cache=True, fastmath=False)(_iterate_python)
else:  # pragma: no cover
    _iterate_fast = _iterate_python


def _initial_phi(system: DiscretizedSystem, config: SweepConfig) -> np.ndarray:
    m = system.grid.m
    if config.initial_guess is None:
        return np.zeros(m + 1)
    phi = np.array(config.initial_guess, dtype=float)
    if phi.shape != (m + 1,):
        raise ValueError(f"initial_guess must have length {m + 1}, got shape {phi.shape}")
    if phi[0] != 0.0:
        raise ValueError("initial_guess[0] must be 0 (normalization)")
    return phi


def solve_core(system: DiscretizedSystem, config: SweepConfig, gamma: float | None) -> DiscreteSolution:
    """Shared sweep driver; gamma=None is the neutral problem, gamma>0 the
    robust one (exponential replenishment term, same F_i)."""
    m, h = system.grid.m, system.grid.h
    p = system.params
    phi = _initial_phi(system, config)
    # Cost of refilling from x_i to full in one move.
    full_cost = p.c * (1.0 - system.grid.nodes) + p.d

    h_value, iters, delta_phi, delta_h, converged = _iterate_fast(
        phi,
        config.relaxation,
        config.tol_phi,
        config.tol_h,
        config.max_iters,
        p.capital_lambda,
        p.c + p.d,
        p.action_set is ActionSet.XI1,
        full_cost,
        system.drift_coeff / h,
        system.cum_zweight / h,
        system.f_diag,
        system.stencil_weight,
        -1.0 if gamma is None else gamma,
    )
    if not converged:
        raise NonConvergenceError(
            iters, delta_phi, delta_h, h_value,
            discretize.residual(system, phi, h_value, gamma),
        )

    eta_star = np.empty(m + 1)
    gaps = np.empty(m + 1)
    for i in range(m + 1):
        value, k_star = replenishment_min(system, i, phi)
        eta_star[i] = h * k_star
        gaps[i] = phi[i] - value
    a_star = np.exp(-gamma * gaps) if gamma is not None else None

    return DiscreteSolution(
        h_value=h_value,
        phi=phi,
        eta_star=eta_star,
        a_star=a_star,
        iters=iters,
        final_residual=discretize.residual(system, phi, h_value, gamma),
    )


def solve(system: DiscretizedSystem, config: SweepConfig = SweepConfig()) -> DiscreteSolution:
    """Solve the ambiguity-neutral problem."""
    return solve_core(system, config, gamma=None)


def extract_threshold(solution: DiscreteSolution, grid: Grid) -> float | None:
    """Threshold x_bar of a refill-to-full policy, if one exists.

    Returns the largest node with a positive refill amount when the action
    region is a contiguous prefix {0, ..., j}; None when the policy never
    acts.  A non-prefix action region raises ThresholdStructureError (that
    shape contradicts the threshold structure the policy is expected to have
    and usually signals a solver problem).  Meaningful for XI1 runs; an XI2
    solution can only yield 0.0 or None.
    """
    active = np.flatnonzero(solution.eta_star > 0.0)
    if active.size == 0:
        return None
    if active[-1] != active.size - 1:
        raise ThresholdStructureError(
            f"action region is not a prefix: active nodes {active.tolist()}"
        )
    return float(grid.nodes[active[-1]])
