"""Ambiguity-averse variant of the ergodic equation (HJBI form).

The decision-maker distrusts the observation intensity: an adversary may
scale it by a > 0 at an entropic price.  Carrying out the inner maximization
turns the neutral replenishment bracket Lambda*(Phi - min) into

    (Lambda/gamma) * (1 - e^{-gamma*(Phi - min)}),

which this module supplies, together with the worst-case distortion
a*(x) = e^{-gamma*(Phi - min)} and a solver entry point.  gamma -> 0 recovers
the neutral problem; larger gamma means more distrust and a larger H.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import sweep
from .discretize import DiscretizedSystem, replenishment_min
from .sweep import DiscreteSolution, SweepConfig

# Exponent magnitude guard for the exp-based public helpers; the solver's
# internal expm1 calls only ever see non-positive arguments and cannot
# overflow, so this exists for out-of-contract inputs (min_value > phi).
_EXP_CLIP = 700.0


@dataclass(frozen=True)
class RobustTermParams:
    """gamma > 0 and the observation intensity Lambda.

    gamma = 0 is not representable here on purpose: the neutral problem is
    the plain solver's job (callers delegate instead of taking limits).
    """

    gamma: float
    capital_lambda: float

    def __post_init__(self):
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")
        if not (self.capital_lambda > 0.0 and math.isfinite(self.capital_lambda)):
            raise ValueError(f"capital_lambda must be positive, got {self.capital_lambda}")


def _clipped_exponent(value: float) -> float:
    if abs(value) > _EXP_CLIP:
        warnings.warn(
            f"robust exponent {value:.3e} clipped to +/-{_EXP_CLIP:.0f}; "
            "inputs violate the gap >= 0 contract or gamma is extreme",
            RuntimeWarning,
            stacklevel=3,
        )
        return math.copysign(_EXP_CLIP, value)
    return value


def robust_replenishment_term(phi_i: float, min_value: float, p: RobustTermParams) -> float:
    """(Lambda/gamma) * (1 - e^{-gamma*(phi_i - min_value)}).

    The gap phi_i - min_value is >= 0 whenever min_value came from an
    admissible minimization (inaction is always a candidate), making the
    term a softened, bounded version of the neutral Lambda*(gap).
    """
    gap = phi_i - min_value
    exponent = _clipped_exponent(-p.gamma * gap)
    return p.capital_lambda / p.gamma * -math.expm1(exponent)


def worst_case_ambiguity(phi: np.ndarray, system: DiscretizedSystem, gamma: float) -> np.ndarray:
    """Adversarial intensity distortion a*_i = e^{-gamma*(Phi_i - min_i)}.

    Values lie in (0, 1]: the adversary thins the observation clock, most
    aggressively where acting would help the controller most.
    """
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    m = system.grid.m
    a = np.empty(m + 1)
    for i in range(m + 1):
        value, _ = replenishment_min(system, i, phi)
        a[i] = math.exp(_clipped_exponent(-gamma * (phi[i] - value)))
    return a


def solve_robust(system: DiscretizedSystem, p: RobustTermParams, config: SweepConfig = SweepConfig()) -> DiscreteSolution:
    """Solve the robust problem with the relaxed fast sweep.

    Same iteration skeleton as the neutral solver: F_i keeps its Lambda term,
    G_i carries Lambda*Phi_i minus the exponential term, and the node-0 row
    closes in H as H = 1 + (Lambda/gamma)*(e^{gamma*m0} - 1) with
    m0 = min{0, Phi_M + c + d}.  The solution's a_star is populated.
    """
    if p.capital_lambda != system.params.capital_lambda:
        raise ValueError(
            "RobustTermParams.capital_lambda disagrees with the system's "
            f"({p.capital_lambda} vs {system.params.capital_lambda})"
        )
    return sweep.solve_core(system, config, gamma=p.gamma)
