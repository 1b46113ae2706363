"""Monte Carlo simulation of the controlled storage process.

The state X in [0, 1] decays by the release rate S(x) = mu*x^(1-alpha), is
flushed down by the increments of a one-sided stable subordinator (truncated
so X never leaves [0, 1]), and can only be replenished at the jump times of a
Poisson observation clock with intensity Lambda.  The running cost is the
occupation time at X = 0 plus c*eta + d per intervention; its long-run time
average is the quantity the solver's H predicts.

Per step of length dt: exact drift decay (x^alpha falls linearly at rate
mu*alpha, floored at 0), then the full subordinator increment over the step,
then any observation whose exact arrival time falls inside the step (costs
booked at the observation).  Occupation time at 0 is accumulated as dt per
step whose end state is 0.

Every path owns two child RNG streams (jumps, observations) spawned from the
master seed, so results are bit-reproducible and independent of how paths
would be distributed across workers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import levy
from .discretize import Grid
from .exact import ControlParams

# Steps per jump-draw chunk; a fixed constant so draw streams are
# reproducible (each path's stream is its own generator, so the value only
# affects memory/speed, never results).
_CHUNK = 4096


@dataclass(frozen=True)
class PathConfig:
    """Simulation setup.

    horizon: total simulated time T (rounded to a whole number of steps).
    x0: initial storage level in [0, 1].
    n_paths: independent paths.
    master_seed: seed of the SeedSequence all per-path streams spawn from.
    dt: Euler step; keep dt << 1/Lambda so observations are resolved.
    """

    horizon: float
    x0: float
    n_paths: int
    master_seed: int
    dt: float = 0.01

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if not (0.0 <= self.x0 <= 1.0):
            raise ValueError(f"x0 must lie in [0,1], got {self.x0}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")


@dataclass(frozen=True)
class PathStats:
    """Cross-path summary of the ergodic cost estimate.

    ergodic_cost_mean / ergodic_cost_stderr: mean and standard error (over
        paths; 0.0 when n_paths = 1) of the per-path time-averaged cost.
    occupation_zero_fraction: mean fraction of time spent depleted.
    replenish_count_rate: interventions per unit time.
    proportional_cost_rate: proportional-cost spend per unit time.
    """

    ergodic_cost_mean: float
    ergodic_cost_stderr: float
    occupation_zero_fraction: float
    replenish_count_rate: float
    proportional_cost_rate: float


def stable_increment(model: levy.JumpModel, dt: float, rng: np.random.Generator, size=None):
    """Draw subordinator increments over a step of length dt.

    One-sided stable law with Laplace transform
    E[e^{-u*Inc}] = exp(-dt * lam * Gamma(1-alpha)/alpha * u^alpha), sampled
    through Kanter's representation: with U ~ Uniform(0, pi), W ~ Exp(1),

        S = sin(alpha*U) * (sin((1-alpha)*U)/W)^{(1-alpha)/alpha}
            / sin(U)^{1/alpha}

    satisfies E[e^{-s*S}] = e^{-s^alpha}; the increment is S scaled by
    (dt*lam*Gamma(1-alpha)/alpha)^{1/alpha}.  Scalar when size is None.
    """
    if model.kind is not levy.JumpKind.STABLE:
        raise ValueError("stable_increment supports only the pure stable model")
    alpha = model.alpha
    scale = (dt * model.lam * math.gamma(1.0 - alpha) / alpha) ** (1.0 / alpha)
    shape = () if size is None else size
    u = rng.uniform(0.0, math.pi, shape)
    w = rng.exponential(1.0, shape)
    # Guard the measure-zero endpoints (u=0 underflows, w=0 divides by zero);
    # clamping at these scales is far below Monte Carlo resolution.
    u = np.maximum(u, 1e-12)
    w = np.maximum(w, 1e-300)
    with np.errstate(over="ignore"):
        s = (
            np.sin(alpha * u)
            * (np.sin((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
            / np.sin(u) ** (1.0 / alpha)
        )
        out = scale * s
    return float(out) if size is None else out


def step(x, dt: float, jump, mu: float, alpha: float):
    """One dt of dynamics: exact drift decay, then the jump, truncated at 0.

    Drift solves dx/dt = -mu*x^(1-alpha) exactly (x^alpha decays linearly at
    rate mu*alpha and sticks at 0); the jump removes min{x, jump}.  Works on
    scalars and arrays.
    """
    x = np.asarray(x, dtype=float)
    x_drift = np.maximum(x**alpha - mu * alpha * dt, 0.0) ** (1.0 / alpha)
    out = x_drift - np.minimum(x_drift, jump)
    return float(out) if out.ndim == 0 else out


def null_policy(x):
    """Never replenish."""
    return np.zeros_like(np.asarray(x, dtype=float))


def exact_policy_fn(kappa: float, params: ControlParams):
    """Vectorized closed-form policy: refill to 1 iff depleted and c+d <= kappa."""
    acts = params.c + params.d <= kappa

    def policy(x):
        x = np.asarray(x, dtype=float)
        return np.where((x == 0.0) & acts, 1.0, 0.0)

    return policy


def table_policy(eta_star: np.ndarray, grid: Grid):
    """Vectorized policy from a solver table via nearest-node lookup.

    The lookup decides whether to act; an acting state refills to full
    (amount 1 - x), which is the only admissible intervention and keeps the
    state in [0, 1] even between nodes.
    """
    act = np.asarray(eta_star) > 0.0

    def policy(x):
        x = np.asarray(x, dtype=float)
        idx = np.rint(x * grid.m).astype(int)
        return np.where(act[idx], 1.0 - x, 0.0)

    return policy


def _draw_observation_steps(rng, capital_lambda, t_end, dt, n_steps):
    """Arrival steps of the Poisson observation clock on (0, t_end].

    Returns the 1-based index of the step containing each arrival (an arrival
    in ((k-1)dt, k*dt] belongs to step k).
    """
    expected = t_end * capital_lambda
    batch = int(expected + 6.0 * math.sqrt(expected) + 16.0)
    gaps = rng.exponential(1.0 / capital_lambda, batch)
    times = np.cumsum(gaps)
    while times[-1] <= t_end:
        gaps = rng.exponential(1.0 / capital_lambda, max(16, batch // 8))
        times = np.concatenate((times, times[-1] + np.cumsum(gaps)))
    times = times[times <= t_end]
    steps = np.minimum(np.ceil(times / dt).astype(np.int64), n_steps)
    return times, steps


def simulate(params: ControlParams, model: levy.JumpModel, policy, config: PathConfig, record_path: bool = False):
    """Run n_paths paths and estimate the ergodic cost.

    policy is a vectorized callable mapping an array of states to replenish
    amounts (>= 0); states with amount 0 are untouched, others are moved to
    min{x + amount, 1} at cost c*amount + d.  Returns PathStats, or
    (PathStats, rows) when record_path is set, where rows are path 0's events
    as (t, x, event, cost_increment) with event in {drift, jump, observe}.
    The cost_increment column sums to path 0's total cost (occupation dt is
    booked on the last event of each step spent at 0).
    """
    if config.dt * params.capital_lambda > 0.1:
        warnings.warn(
            f"dt*Lambda = {config.dt * params.capital_lambda:.3f}; observation "
            "arrivals are poorly resolved at this step size",
            RuntimeWarning,
        )
    n_paths = config.n_paths
    dt = config.dt
    alpha = model.alpha
    mu = params.mu
    n_steps = int(round(config.horizon / dt))
    if n_steps < 1:
        raise ValueError("horizon shorter than one step")
    t_end = n_steps * dt

    root = np.random.SeedSequence(config.master_seed)
    jump_rngs = []
    obs_steps = []
    obs_times = []
    next_obs = np.empty(n_paths, dtype=np.int64)
    ptr = np.zeros(n_paths, dtype=np.int64)
    sentinel = n_steps + 1
    for p, child in enumerate(root.spawn(n_paths)):
        jump_seq, obs_seq = child.spawn(2)
        jump_rngs.append(np.random.Generator(np.random.PCG64(jump_seq)))
        obs_rng = np.random.Generator(np.random.PCG64(obs_seq))
        times, steps = _draw_observation_steps(obs_rng, params.capital_lambda, t_end, dt, n_steps)
        obs_times.append(times)
        obs_steps.append(steps)
        next_obs[p] = steps[0] if steps.size else sentinel

    x = np.full(n_paths, float(config.x0))
    y = x**alpha
    occ_steps = np.zeros(n_paths, dtype=np.int64)
    prop_cost = np.zeros(n_paths)
    act_count = np.zeros(n_paths, dtype=np.int64)
    drift_dec = mu * alpha * dt
    inv_alpha = 1.0 / alpha
    rows = [] if record_path else None
    next_obs_min = int(next_obs.min()) if n_paths else sentinel

    for chunk_start in range(0, n_steps, _CHUNK):
        k_eff = min(_CHUNK, n_steps - chunk_start)
        jumps = np.empty((k_eff, n_paths))
        for p in range(n_paths):
            jumps[:, p] = stable_increment(model, dt, jump_rngs[p], size=k_eff)
        for s in range(k_eff):
            step_idx = chunk_start + s + 1
            # drift phase (exact ODE on x^alpha), then jump phase
            np.subtract(y, drift_dec, out=y)
            np.maximum(y, 0.0, out=y)
            x_drift = y**inv_alpha
            x = x_drift - np.minimum(x_drift, jumps[s])
            if record_path:
                t_now = step_idx * dt
                rows.append([t_now, float(x_drift[0]), "drift", 0.0])
                rows.append([t_now, float(x[0]), "jump", 0.0])
            while step_idx >= next_obs_min:
                mask = next_obs == step_idx
                if not mask.any():
                    break
                xm = x[mask]
                eta = np.asarray(policy(xm), dtype=float)
                if np.any(eta < 0.0):
                    raise ValueError("policy returned a negative amount")
                prop_cost[mask] += params.c * eta
                acting = eta > 0.0
                act_count[mask] += acting
                x[mask] = np.minimum(xm + eta, 1.0)
                if record_path and mask[0]:
                    cost0 = params.c * eta[0] + (params.d if eta[0] > 0.0 else 0.0)
                    rows.append([float(obs_times[0][ptr[0]]), float(x[0]), "observe", cost0])
                idx = np.flatnonzero(mask)
                ptr[idx] += 1
                for p in idx:
                    seq = obs_steps[p]
                    next_obs[p] = seq[ptr[p]] if ptr[p] < seq.size else sentinel
                next_obs_min = int(next_obs.min())
            y = x**alpha
            occ_steps += x == 0.0
            if record_path and x[0] == 0.0:
                rows[-1][3] += dt

    total = occ_steps * dt + prop_cost + params.d * act_count
    per_path = total / t_end
    mean = float(per_path.mean())
    stderr = float(per_path.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else 0.0
    stats = PathStats(
        ergodic_cost_mean=mean,
        ergodic_cost_stderr=stderr,
        occupation_zero_fraction=float((occ_steps * dt / t_end).mean()),
        replenish_count_rate=float(act_count.mean() / t_end),
        proportional_cost_rate=float(prop_cost.mean() / t_end),
    )
    if record_path:
        return stats, [tuple(r) for r in rows]
    return stats
