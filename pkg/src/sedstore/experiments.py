"""Experiment runners behind the CLI: config parsing, solves over grids of
resolutions or parameters, and deterministic CSV/JSON-friendly records.

Config files are flat ``key = value`` text (one pair per line, ``#`` starts a
comment).  Keys, types and defaults:

    alpha           float in (0,1)      required   stability index
    lambda          float > 0           required   jump intensity scale
    tempering       float >= 0          0          tempering rate b
    mu              float >= 0          required   drift scale
    c               float > 0           required   proportional cost
    d               float > 0           required   fixed cost
    capital_lambda  float > 0           required   observation intensity
    gamma           float >= 0          0          ambiguity aversion (0 = neutral)
    action_set      xi1 | xi2           xi2        admissible refills
    m               int >= 2            200        grid cells
    relaxation      float in (0,1)      0.5        sweep damping R
    tol             float > 0           1e-10      termination (both dPhi and dH)
    max_iters       int >= 1            1000000    sweep iteration cap
    m_list          comma ints >= 2     50,100,200,400,800,1600   converge resolutions
    alpha_min       float in (0,1)      0.01       alpha-sweep range
    alpha_max       float in (0,1)      0.99
    alpha_count     int >= 2            50
    gamma_min       float > 0           0.001      gamma-sweep range (log-spaced)
    gamma_max       float > 0           10.0
    gamma_count     int >= 2            25
    seed            int                 0          master seed (CLI --seed overrides)
    dt              float > 0           0.01       simulation step
    horizon         float > 0           1000.0     simulated time T
    n_paths         int >= 1            100        Monte Carlo paths
    x0              float in [0,1]      0.5        initial storage
    policy          exact|null|table    exact      simulated policy

Unknown keys are errors.  One config can drive every subcommand; each command
reads the keys it needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import discretize, levy, paths, robust, sweep
from .exact import ActionSet, ControlParams, exact_potential, solve_exact
from .sweep import NonConvergenceError, SweepConfig


class ConfigError(ValueError):
    """Invalid or missing configuration; the CLI maps this to exit code 2."""


@dataclass(frozen=True)
class Config:
    alpha: float
    lam: float
    mu: float
    c: float
    d: float
    capital_lambda: float
    tempering: float = 0.0
    gamma: float = 0.0
    action_set: ActionSet = ActionSet.XI2
    m: int = 200
    relaxation: float = 0.5
    tol: float = 1e-10
    max_iters: int = 10**6
    m_list: tuple = (50, 100, 200, 400, 800, 1600)
    alpha_min: float = 0.01
    alpha_max: float = 0.99
    alpha_count: int = 50
    gamma_min: float = 1e-3
    gamma_max: float = 10.0
    gamma_count: int = 25
    seed: int = 0
    dt: float = 0.01
    horizon: float = 1000.0
    n_paths: int = 100
    x0: float = 0.5
    policy: str = "exact"


_REQUIRED = ("alpha", "lambda", "mu", "c", "d", "capital_lambda")


def _parse_float(key, raw, low=None, high=None, low_open=False, high_open=False):
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"config key '{key}': expected a number, got '{raw}'") from None
    if not math.isfinite(v):
        raise ConfigError(f"config key '{key}': must be finite, got '{raw}'")
    if low is not None and (v < low or (low_open and v == low)):
        raise ConfigError(f"config key '{key}': must be {'>' if low_open else '>='} {low}, got {v}")
    if high is not None and (v > high or (high_open and v == high)):
        raise ConfigError(f"config key '{key}': must be {'<' if high_open else '<='} {high}, got {v}")
    return v


def _parse_int(key, raw, low=None):
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"config key '{key}': expected an integer, got '{raw}'") from None
    if low is not None and v < low:
        raise ConfigError(f"config key '{key}': must be >= {low}, got {v}")
    return v


_PARSERS = {
    "alpha": lambda r: _parse_float("alpha", r, 0.0, 1.0, True, True),
    "lambda": lambda r: _parse_float("lambda", r, 0.0, low_open=True),
    "tempering": lambda r: _parse_float("tempering", r, 0.0),
    "mu": lambda r: _parse_float("mu", r, 0.0),
    "c": lambda r: _parse_float("c", r, 0.0, low_open=True),
    "d": lambda r: _parse_float("d", r, 0.0, low_open=True),
    "capital_lambda": lambda r: _parse_float("capital_lambda", r, 0.0, low_open=True),
    "gamma": lambda r: _parse_float("gamma", r, 0.0),
    "m": lambda r: _parse_int("m", r, 2),
    "relaxation": lambda r: _parse_float("relaxation", r, 0.0, 1.0, True, True),
    "tol": lambda r: _parse_float("tol", r, 0.0, low_open=True),
    "max_iters": lambda r: _parse_int("max_iters", r, 1),
    "alpha_min": lambda r: _parse_float("alpha_min", r, 0.0, 1.0, True, True),
    "alpha_max": lambda r: _parse_float("alpha_max", r, 0.0, 1.0, True, True),
    "alpha_count": lambda r: _parse_int("alpha_count", r, 2),
    "gamma_min": lambda r: _parse_float("gamma_min", r, 0.0, low_open=True),
    "gamma_max": lambda r: _parse_float("gamma_max", r, 0.0, low_open=True),
    "gamma_count": lambda r: _parse_int("gamma_count", r, 2),
    "seed": lambda r: _parse_int("seed", r),
    "dt": lambda r: _parse_float("dt", r, 0.0, low_open=True),
    "horizon": lambda r: _parse_float("horizon", r, 0.0, low_open=True),
    "n_paths": lambda r: _parse_int("n_paths", r, 1),
    "x0": lambda r: _parse_float("x0", r, 0.0, 1.0),
}


def _parse_action_set(raw):
    try:
        return ActionSet(raw.strip().lower())
    except ValueError:
        raise ConfigError(f"config key 'action_set': expected xi1 or xi2, got '{raw}'") from None


def _parse_m_list(raw):
    try:
        vals = tuple(int(tok) for tok in raw.split(","))
    except ValueError:
        raise ConfigError(f"config key 'm_list': expected comma-separated integers, got '{raw}'") from None
    if not vals or any(v < 2 for v in vals):
        raise ConfigError(f"config key 'm_list': entries must be >= 2, got '{raw}'")
    return vals


def _parse_policy(raw):
    v = raw.strip().lower()
    if v not in ("exact", "null", "table"):
        raise ConfigError(f"config key 'policy': expected exact, null or table, got '{raw}'")
    return v


def parse_config_text(text: str) -> Config:
    """Parse and validate flat key=value config text."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got '{line.strip()}'")
        key, value = (part.strip() for part in body.split("=", 1))
        if key in raw:
            raise ConfigError(f"config line {lineno}: duplicate key '{key}'")
        raw[key] = value

    known = set(_PARSERS) | {"action_set", "m_list", "policy"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(k for k in _REQUIRED if k not in raw)
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")

    kwargs = {}
    for key, value in raw.items():
        if key == "action_set":
            kwargs["action_set"] = _parse_action_set(value)
        elif key == "m_list":
            kwargs["m_list"] = _parse_m_list(value)
        elif key == "policy":
            kwargs["policy"] = _parse_policy(value)
        elif key == "lambda":
            kwargs["lam"] = _PARSERS["lambda"](value)
        else:
            kwargs[key] = _PARSERS[key](value)
    cfg = Config(**kwargs)
    if cfg.tempering > 0.0 and cfg.policy == "exact":
        # The closed-form policy only exists for the pure stable model; leave
        # validation of that mismatch to the simulate command.
        pass
    if cfg.alpha_min >= cfg.alpha_max:
        raise ConfigError("alpha_min must be smaller than alpha_max")
    if cfg.gamma_min >= cfg.gamma_max:
        raise ConfigError("gamma_min must be smaller than gamma_max")
    return cfg


def load_config(path) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config_text(text)


def model_from(cfg: Config, alpha=None, normalized_lambda=False) -> levy.JumpModel:
    a = cfg.alpha if alpha is None else alpha
    if cfg.tempering > 0.0:
        return levy.tempered_model(a, cfg.lam, cfg.tempering)
    model = levy.stable_model(a, cfg.lam)
    return levy.normalized(model) if normalized_lambda else model


def params_from(cfg: Config, gamma=None, action_set=None) -> ControlParams:
    return ControlParams(
        c=cfg.c,
        d=cfg.d,
        mu=cfg.mu,
        capital_lambda=cfg.capital_lambda,
        gamma=cfg.gamma if gamma is None else gamma,
        action_set=cfg.action_set if action_set is None else action_set,
    )


def sweep_config_from(cfg: Config) -> SweepConfig:
    return SweepConfig(
        relaxation=cfg.relaxation,
        tol_phi=cfg.tol,
        tol_h=cfg.tol,
        max_iters=cfg.max_iters,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors against the closed form per resolution, with doubling rates.

    rate_phi[k] / rate_h[k] correspond to the pair (m_values[k-1], m_values[k])
    and are None for k = 0 or when the resolutions do not double.
    """

    m_values: tuple
    err_phi: tuple
    err_h: tuple
    rate_phi: tuple
    rate_h: tuple


@dataclass(frozen=True)
class SweepRecord:
    """One sweep grid point: the swept parameter value, H, and the threshold.

    failed marks solver non-convergence (H/x_bar are then None).  For robust
    sweeps the a* summary holds (min a*, a* one node below x_bar, one above).
    """

    param: float
    h_value: float | None
    x_bar: float | None
    has_threshold: bool
    failed: bool = False
    a_star_min: float | None = None
    a_star_below: float | None = None
    a_star_above: float | None = None


def doubling_rate(err_coarse, err_fine):
    """log2(e_M / e_2M): measured convergence order across one refinement."""
    if err_coarse <= 0.0 or err_fine <= 0.0:
        return None
    return math.log2(err_coarse / err_fine)


def run_exact(cfg: Config):
    """Closed-form solution: (kappa, H_hat) plus the potential on the grid."""
    if cfg.tempering > 0.0:
        raise ConfigError("the exact command requires a pure stable model (tempering = 0)")
    model = model_from(cfg)
    params = params_from(cfg, action_set=ActionSet.XI2)
    sol = solve_exact(model, params)
    grid = discretize.Grid(cfg.m)
    phi = exact_potential(grid.nodes, sol)
    rows = [(i, grid.nodes[i], phi[i]) for i in range(cfg.m + 1)]
    summary = {"kappa": sol.kappa, "h_hat": sol.h_hat, "alpha": sol.alpha, "m": cfg.m}
    return summary, rows


def run_solve(cfg: Config):
    """One solve at the configured resolution (robust when gamma > 0)."""
    model = model_from(cfg)
    params = params_from(cfg)
    grid = discretize.Grid(cfg.m)
    system = discretize.build(grid, params, model)
    sc = sweep_config_from(cfg)
    if cfg.gamma > 0.0:
        rp = robust.RobustTermParams(gamma=cfg.gamma, capital_lambda=cfg.capital_lambda)
        solution = robust.solve_robust(system, rp, sc)
    else:
        solution = sweep.solve(system, sc)
    try:
        x_bar = sweep.extract_threshold(solution, grid)
    except sweep.ThresholdStructureError:
        x_bar = None
    summary = {
        "h_value": solution.h_value,
        "iters": solution.iters,
        "final_residual": solution.final_residual,
        "x_bar": x_bar,
        "m": cfg.m,
        "gamma": cfg.gamma,
        "action_set": params.action_set.value,
    }
    rows = []
    for i in range(cfg.m + 1):
        a = solution.a_star[i] if solution.a_star is not None else None
        rows.append((i, grid.nodes[i], solution.phi[i], solution.eta_star[i], a))
    return summary, rows, solution, grid


def converge_rows(report: ConvergenceReport):
    return [
        (report.m_values[k], report.err_phi[k], report.err_h[k], report.rate_phi[k], report.rate_h[k])
        for k in range(len(report.m_values))
    ]


def run_converge(cfg: Config, on_partial=None) -> ConvergenceReport:
    """Errors against the closed form over cfg.m_list.

    Requires XI2 and a pure stable model (the regime with a closed form).  If
    a resolution fails to converge, on_partial (if given) receives the rows
    collected so far before the error propagates.
    """
    if cfg.tempering > 0.0:
        raise ConfigError("the converge command requires a pure stable model (tempering = 0)")
    if cfg.action_set is not ActionSet.XI2:
        raise ConfigError("the converge command requires action_set = xi2 (closed-form regime)")
    model = model_from(cfg)
    params = params_from(cfg, gamma=0.0)
    sol = solve_exact(model, params)
    sc = sweep_config_from(cfg)

    m_values, err_phi, err_h, rate_phi, rate_h = [], [], [], [], []
    for k, m in enumerate(cfg.m_list):
        grid = discretize.Grid(m)
        system = discretize.build(grid, params, model)
        try:
            solution = sweep.solve(system, sc)
        except NonConvergenceError:
            if on_partial is not None:
                on_partial(
                    ConvergenceReport(
                        tuple(m_values), tuple(err_phi), tuple(err_h),
                        tuple(rate_phi), tuple(rate_h),
                    )
                )
            raise
        phi_hat = exact_potential(grid.nodes, sol)
        e_phi = float(np.max(np.abs(solution.phi - phi_hat)))
        e_h = abs(solution.h_value - sol.h_hat)
        m_values.append(m)
        err_phi.append(e_phi)
        err_h.append(e_h)
        if k > 0 and m == 2 * cfg.m_list[k - 1]:
            rate_phi.append(doubling_rate(err_phi[-2], e_phi))
            rate_h.append(doubling_rate(err_h[-2], e_h))
        else:
            rate_phi.append(None)
            rate_h.append(None)
    return ConvergenceReport(tuple(m_values), tuple(err_phi), tuple(err_h), tuple(rate_phi), tuple(rate_h))


def _solve_sweep_point(system, grid, sc, gamma=None):
    """Solve one sweep point; returns a SweepRecord body (without param)."""
    if gamma is None:
        solution = sweep.solve(system, sc)
    else:
        rp = robust.RobustTermParams(gamma=gamma, capital_lambda=system.params.capital_lambda)
        solution = robust.solve_robust(system, rp, sc)
    x_bar = sweep.extract_threshold(solution, grid)
    rec = {
        "h_value": solution.h_value,
        "x_bar": x_bar,
        "has_threshold": x_bar is not None,
    }
    if gamma is not None:
        a = solution.a_star
        rec["a_star_min"] = float(np.min(a))
        if x_bar is not None:
            j = int(round(x_bar * grid.m))
            rec["a_star_below"] = float(a[max(j - 1, 0)])
            rec["a_star_above"] = float(a[min(j + 1, grid.m)])
    return rec


def run_alpha_sweep(cfg: Config):
    """H and x_bar across alpha (XI1, fair-comparison lambda -> alpha*lambda).

    Per-point solver failures are recorded (failed=True) and the sweep
    continues.
    """
    if cfg.tempering > 0.0:
        raise ConfigError("the alpha-sweep command requires a pure stable model (tempering = 0)")
    grid = discretize.Grid(cfg.m)
    sc = sweep_config_from(cfg)
    records = []
    for a in np.linspace(cfg.alpha_min, cfg.alpha_max, cfg.alpha_count):
        a = float(a)
        model = model_from(cfg, alpha=a, normalized_lambda=True)
        params = params_from(cfg, gamma=0.0, action_set=ActionSet.XI1)
        system = discretize.build(grid, params, model)
        try:
            body = _solve_sweep_point(system, grid, sc)
        except (NonConvergenceError, sweep.ThresholdStructureError):
            records.append(SweepRecord(param=a, h_value=None, x_bar=None, has_threshold=False, failed=True))
            continue
        records.append(SweepRecord(param=a, **body))
    return records


def run_gamma_sweep(cfg: Config):
    """H, x_bar and the a* summary across log-spaced gamma (XI1, robust)."""
    grid = discretize.Grid(cfg.m)
    sc = sweep_config_from(cfg)
    model = model_from(cfg)
    params = params_from(cfg, gamma=0.0, action_set=ActionSet.XI1)
    system = discretize.build(grid, params, model)
    gammas = np.logspace(math.log10(cfg.gamma_min), math.log10(cfg.gamma_max), cfg.gamma_count)
    records = []
    for g in gammas:
        g = float(g)
        try:
            body = _solve_sweep_point(system, grid, sc, gamma=g)
        except (NonConvergenceError, sweep.ThresholdStructureError):
            records.append(SweepRecord(param=g, h_value=None, x_bar=None, has_threshold=False, failed=True))
            continue
        records.append(SweepRecord(param=g, **body))
    return records


def run_simulate(cfg: Config, record_path: bool = False):
    """Monte Carlo run under the configured policy."""
    model = model_from(cfg)
    params = params_from(cfg)
    if cfg.policy == "null":
        policy = paths.null_policy
    elif cfg.policy == "exact":
        if cfg.tempering > 0.0:
            raise ConfigError("policy=exact requires a pure stable model (tempering = 0)")
        kappa = levy.kappa(cfg.alpha, cfg.mu, cfg.lam)
        policy = paths.exact_policy_fn(kappa, params)
    else:  # table
        _, _, solution, grid = run_solve(cfg)
        policy = paths.table_policy(solution.eta_star, grid)
    pc = paths.PathConfig(
        horizon=cfg.horizon, x0=cfg.x0, n_paths=cfg.n_paths,
        master_seed=cfg.seed, dt=cfg.dt,
    )
    return paths.simulate(params, model, policy, pc, record_path=record_path)


def format_cell(value) -> str:
    """Deterministic CSV cell: shortest round-trip floats, blank for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")
