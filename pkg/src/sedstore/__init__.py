"""Ergodic control of a jump-driven storage process.

A solver and validation toolkit for the long-run-average (ergodic) control of
a storage level in [0, 1] that decays deterministically, is flushed by the
jumps of a one-sided stable subordinator, and can be refilled to full only at
Poisson-distributed observation times.  The package computes the effective
Hamiltonian H (the optimal long-run average cost) and the potential Phi by a
relaxed Gauss-Seidel fast sweep over a finite-difference discretization of
the governing non-local equation, checks the result against the closed-form
solution available in the depleted-refill regime, extends the equation to an
ambiguity-averse (robust) variant, and validates H by Monte Carlo simulation
of the controlled process.
"""
from .discretize import DiscretizedSystem, Grid, build, nonlocal_sum, replenishment_min, residual
from .exact import (
    ActionSet,
    ControlParams,
    ExactSolution,
    effective_hamiltonian,
    exact_policy,
    exact_potential,
    solve_exact,
)
from .levy import I_alpha, JumpKind, JumpModel, density, kappa, normalized, stable_model, tail_mass_above_one, tempered_model
from .robust import RobustTermParams, robust_replenishment_term, solve_robust, worst_case_ambiguity
from .paths import (
    PathConfig,
    PathStats,
    exact_policy_fn,
    null_policy,
    simulate,
    stable_increment,
    step,
    table_policy,
)
from .sweep import (
    DiscreteSolution,
    NonConvergenceError,
    SweepConfig,
    ThresholdStructureError,
    extract_threshold,
    solve,
)

__all__ = [
    "ActionSet",
    "ControlParams",
    "DiscreteSolution",
    "DiscretizedSystem",
    "ExactSolution",
    "Grid",
    "I_alpha",
    "JumpKind",
    "JumpModel",
    "NonConvergenceError",
    "PathConfig",
    "PathStats",
    "RobustTermParams",
    "SweepConfig",
    "ThresholdStructureError",
    "build",
    "density",
    "effective_hamiltonian",
    "exact_policy",
    "exact_policy_fn",
    "exact_potential",
    "extract_threshold",
    "kappa",
    "nonlocal_sum",
    "normalized",
    "null_policy",
    "replenishment_min",
    "residual",
    "robust_replenishment_term",
    "simulate",
    "solve",
    "solve_exact",
    "solve_robust",
    "stable_increment",
    "stable_model",
    "step",
    "table_policy",
    "tail_mass_above_one",
    "tempered_model",
    "worst_case_ambiguity",
]

__version__ = "0.1.0"
