"""Closed-form solution of the ergodic control problem.

For the pure stable measure with drift S(x) = mu*x^(1-alpha) and depleted-state
replenishment only (action set XI2), the effective Hamiltonian H, the potential
Phi and the optimal policy are explicit:

    H_hat   = (1 + Lambda * min{c + d, kappa}) / (1 + kappa * Lambda)
    Phi_hat = -kappa * H_hat * x^alpha
    eta*(x) = 1  iff  x = 0 and c + d <= kappa,  else 0.

This is the oracle every numerical run is measured against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import levy


class ActionSet(Enum):
    """Admissible replenishment amounts at state x.

    XI1: do nothing or refill to full, {0, 1-x}, from any state.
    XI2: refill allowed only when depleted, {0, 1} at x = 0, {0} otherwise.
    """

    XI1 = "xi1"
    XI2 = "xi2"


@dataclass(frozen=True)
class ControlParams:
    """Cost and observation parameters of the control problem.

    c: proportional replenishment cost (> 0)
    d: fixed per-intervention cost (> 0)
    mu: drift scale in S(x) = mu*x^(1-alpha) (>= 0)
    capital_lambda: intensity of the Poisson observation clock (> 0)
    gamma: ambiguity-aversion weight (>= 0; 0 is the neutral problem)
    action_set: XI1 or XI2
    """

    c: float
    d: float
    mu: float
    capital_lambda: float
    gamma: float = 0.0
    action_set: ActionSet = ActionSet.XI2

    def __post_init__(self):
        for name in ("c", "d", "capital_lambda"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if not (self.mu >= 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be >= 0 and finite, got {self.mu}")
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be >= 0 and finite, got {self.gamma}")


@dataclass(frozen=True)
class ExactSolution:
    """Closed-form solution bundle: kappa, H_hat and the potential exponent."""

    kappa: float
    h_hat: float
    alpha: float


def effective_hamiltonian(kappa: float, params: ControlParams) -> float:
    """Closed-form long-run average cost H_hat for the XI2 problem.

    Lies in (1/(1 + kappa*Lambda), 1]; equals 1 exactly when replenishment is
    never worth it (c + d >= kappa).
    """
    if params.action_set is not ActionSet.XI2:
        raise ValueError("closed form covers the XI2 action set only")
    lam_obs = params.capital_lambda
    return (1.0 + lam_obs * min(params.c + params.d, kappa)) / (1.0 + kappa * lam_obs)


def exact_potential(x, sol: ExactSolution):
    """Potential Phi_hat(x) = -kappa * H_hat * x^alpha on [0, 1].

    Normalized to Phi_hat(0) = 0; non-increasing and convex.  Accepts scalars
    or arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ValueError("x must lie in [0, 1]")
    out = -sol.kappa * sol.h_hat * x ** sol.alpha
    return float(out) if out.ndim == 0 else out


def exact_policy(x: float, kappa: float, params: ControlParams) -> float:
    """Optimal replenishment amount at state x: refill to 1 iff depleted and
    the full cost c + d does not exceed kappa (ties act)."""
    if params.action_set is not ActionSet.XI2:
        raise ValueError("closed form covers the XI2 action set only")
    if not (0.0 <= x <= 1.0):
        raise ValueError("x must lie in [0, 1]")
    return 1.0 if (x == 0.0 and params.c + params.d <= kappa) else 0.0


def solve_exact(model: levy.JumpModel, params: ControlParams) -> ExactSolution:
    """Assemble the closed-form solution for a pure stable model."""
    if model.kind is not levy.JumpKind.STABLE:
        raise ValueError("closed form covers the pure stable model only")
    k = levy.kappa(model.alpha, params.mu, model.lam)
    return ExactSolution(kappa=k, h_hat=effective_hamiltonian(k, params), alpha=model.alpha)
