"""Finite-difference assembly of the ergodic HJB equation on [0, 1].

The unknowns are the constant H and the potential Phi on a uniform grid
x_i = i*h, h = 1/M, with Phi_0 = 0 pinned.  At interior/right nodes (i >= 1)
the discretized equation reads

    H + D_i*(Phi_i - Phi_{i-1})/h + c_i*Phi_i
      + sum_{j=1..i} [Phi_i - (Phi_{i-j}+Phi_{i-j+1})/2
                      - z_{j-1/2}*(Phi_i - Phi_{i-1})/h] * w_j
      + (replenishment term) = 0,

where D_i = S(x_i) + (small-jump drift compensator), c_i is the decay rate
from jumps past x_i, z_{j-1/2} = (j-1/2)h are cell midpoints tiling (0, x_i),
and w_j = density(z_{j-1/2})*h are midpoint quadrature weights.  At node 0 the
equation degenerates to H = 1 + Lambda*min{0, Phi_M + c + d} (the depletion
cost sits there, and only the refill-to-full action competes with inaction).

The replenishment term is Lambda*(Phi_i - min_k{Phi_{i+k} + c*k*h + d*1_{k>0}})
in the ambiguity-neutral problem; the robust variant replaces it with an
exponential expression (see the robust module).  Either way every positive
coefficient of Phi_i is collected into F_i > 0 so the node equation can be
solved for Phi_i by a well-defined division.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import levy
from .exact import ActionSet, ControlParams


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, 1] with m cells (m+1 nodes)."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"grid needs at least 2 cells, got m={self.m}")

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m


@dataclass(frozen=True)
class DiscretizedSystem:
    """Immutable coefficient bundle for one (grid, params, model) triple.

    Arrays are indexed by node i = 0..M unless noted; treat them as read-only.
    Node 0 has no assembled row (decay_coeff[0] and f_diag[0] are NaN).

    drift_coeff: S(x_i) + drift compensator of small jumps.
    decay_coeff: rate of jumps overshooting x_i (coefficient of Phi_i).
    quad_weight: w_j for cells j = 1..M (shape (M,)), midpoint weights.
    f_diag: F_i = Lambda + drift_coeff_i/h + decay_coeff_i + sum_{j<=i} w_j.
    midpoints: z_{j-1/2} for j = 1..M (shape (M,)).
    cum_weight / cum_zweight: prefix sums sum_{j<=i} w_j and sum_{j<=i} z_j*w_j.
    stencil_weight: coefficient of Phi_{i-k} in the stencil-average sum,
        Q[0] = w_1/2, Q[k] = (w_k + w_{k+1})/2; used by the solver's
        single-dot-product evaluation of the averages.
    """

    grid: Grid
    params: ControlParams
    model: levy.JumpModel
    drift_coeff: np.ndarray
    decay_coeff: np.ndarray
    quad_weight: np.ndarray
    f_diag: np.ndarray
    midpoints: np.ndarray
    cum_weight: np.ndarray
    cum_zweight: np.ndarray
    stencil_weight: np.ndarray


# Truncation level for tempered tail integrals: Z_max is doubled until the
# analytic bound on the discarded mass drops below this.
_TAIL_TOL = 1e-12


def _tempered_tail_cut(model: levy.JumpModel) -> float:
    b, lam, alpha = model.tempering, model.lam, model.alpha
    z = 2.0
    while lam * z ** (-(1.0 + alpha)) * math.exp(-b * z) / b >= _TAIL_TOL:
        z *= 2.0
    return z


def build(grid: Grid, params: ControlParams, model: levy.JumpModel, drift_fn=None) -> DiscretizedSystem:
    """Assemble all node coefficients.

    drift_fn is the deterministic release rate S(x) (non-negative); the
    default is S(x) = mu * x^(1-alpha).
    """
    m, h = grid.m, grid.h
    alpha, lam, b = model.alpha, model.lam, model.tempering
    x = grid.nodes
    if drift_fn is None:
        s_vals = params.mu * x ** (1.0 - alpha)
    else:
        s_vals = np.asarray([drift_fn(xi) for xi in x], dtype=float)
        if np.any(s_vals < 0.0) or not np.all(np.isfinite(s_vals)):
            raise ValueError("drift_fn must be non-negative and finite on the grid")

    if model.kind is levy.JumpKind.STABLE:
        midpoints = (np.arange(1, m + 1) - 0.5) * h
        quad_weight = lam * midpoints ** (-(1.0 + alpha)) * h
        compensator = lam / (1.0 - alpha) * x ** (1.0 - alpha)
        decay = np.empty(m + 1)
        decay[0] = np.nan
        decay[1:] = lam / alpha * x[1:] ** (-alpha)
    else:
        # Same midpoint rule, tempered density, integrals truncated at Z_max.
        z_max = _tempered_tail_cut(model)
        n_cells = max(m, math.ceil(z_max / h))
        z_all = (np.arange(1, n_cells + 1) - 0.5) * h
        g_all = lam * z_all ** (-(1.0 + alpha)) * np.exp(-b * z_all) * h
        midpoints = z_all[:m]
        quad_weight = g_all[:m]
        pref = np.concatenate(([0.0], np.cumsum(z_all * g_all)))
        compensator = pref[: m + 1]          # sum_{k<=i} z_k g_k ~ int_0^{x_i} z nu(dz)
        suff = np.cumsum(g_all[::-1])[::-1]  # suff[k] = sum_{j>=k+1} g_j
        decay = np.empty(m + 1)
        decay[0] = np.nan
        decay[1:] = suff[1 : m + 1]          # ~ int_{x_i}^{Z_max} nu(dz)

    drift_coeff = s_vals + compensator
    cum_weight = np.concatenate(([0.0], np.cumsum(quad_weight)))
    cum_zweight = np.concatenate(([0.0], np.cumsum(midpoints * quad_weight)))

    stencil_weight = np.empty(m)
    stencil_weight[0] = quad_weight[0] / 2.0
    stencil_weight[1:] = (quad_weight[:-1] + quad_weight[1:]) / 2.0

    f_diag = np.empty(m + 1)
    f_diag[0] = np.nan
    f_diag[1:] = (
        params.capital_lambda
        + drift_coeff[1:] / h
        + decay[1:]
        + cum_weight[1:]
    )

    return DiscretizedSystem(
        grid=grid,
        params=params,
        model=model,
        drift_coeff=drift_coeff,
        decay_coeff=decay,
        quad_weight=quad_weight,
        f_diag=f_diag,
        midpoints=midpoints,
        cum_weight=cum_weight,
        cum_zweight=cum_zweight,
        stencil_weight=stencil_weight,
    )


def nonlocal_sum(system: DiscretizedSystem, i: int, phi: np.ndarray) -> float:
    """Compensated jump quadrature at node i >= 1 (literal stencil form).

    sum_{j=1..i} [Phi_i - (Phi_{i-j}+Phi_{i-j+1})/2
                  - z_{j-1/2}*(Phi_i - Phi_{i-1})/h] * w_j

    Vanishes identically on constant and affine phi (the compensation is
    exact for the midpoint stencil).  The solver uses an algebraically equal
    prefix-sum form; this function is the readable reference.
    """
    if i < 1:
        raise ValueError("nonlocal_sum is defined for nodes i >= 1 only")
    h = system.grid.h
    w = system.quad_weight[:i]
    z = system.midpoints[:i]
    avg = 0.5 * (phi[i - 1 :: -1][:i] + phi[i:0:-1])
    slope = (phi[i] - phi[i - 1]) / h
    return float(np.dot(w, phi[i] - avg - z * slope))


def replenishment_min(system: DiscretizedSystem, i: int, phi: np.ndarray):
    """Best replenishment value at node i: min over admissible refill sizes k
    of Phi_{i+k} + c*k*h + d*1_{k>0}.  Returns (value, k_star); ties prefer
    k = 0 (inaction).

    Admissible k: refill to full or nothing.  XI1 allows {0, M-i} at every
    node; XI2 allows {0, M} at the depleted node and {0} elsewhere.
    """
    m = system.grid.m
    p = system.params
    if p.action_set is ActionSet.XI1:
        k_full = m - i
    else:
        k_full = m if i == 0 else 0
    value, k_star = float(phi[i]), 0
    if k_full > 0:
        cand = float(phi[i + k_full]) + p.c * k_full * system.grid.h + p.d
        if cand < value:
            value, k_star = cand, k_full
    return value, k_star


def residual(system: DiscretizedSystem, phi: np.ndarray, h_value: float, gamma: float | None = None) -> float:
    """Max absolute row residual of the discretized equation (node 0 included).

    With gamma=None the neutral replenishment term Lambda*(Phi_i - min) is
    used; a positive gamma selects the robust exponential term.
    """
    if phi[0] != 0.0:
        raise ValueError("phi[0] must be 0 (normalization)")
    p = system.params
    lam_obs = p.capital_lambda
    h = system.grid.h
    m = system.grid.m

    def repl_term(gap):
        if gamma is None:
            return lam_obs * gap
        return lam_obs / gamma * -math.expm1(-gamma * gap)

    m0, _ = replenishment_min(system, 0, phi)
    worst = abs(h_value - 1.0 + repl_term(0.0 - m0))
    for i in range(1, m + 1):
        mi, _ = replenishment_min(system, i, phi)
        row = (
            h_value
            + system.drift_coeff[i] * (phi[i] - phi[i - 1]) / h
            + system.decay_coeff[i] * phi[i]
            + nonlocal_sum(system, i, phi)
            + repl_term(phi[i] - mi)
        )
        worst = max(worst, abs(row))
    return worst
