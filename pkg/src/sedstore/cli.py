"""Command-line interface.

    sedstore <command> --config PATH [--out PATH] [--seed N] [--threads N]

Commands: exact, solve, converge, alpha-sweep, gamma-sweep, simulate.  Every
command prints a JSON summary to stdout; --out additionally writes a CSV
(schemas below).  --seed overrides the config's seed; --threads is accepted
as a parallelism hint and never affects results (the current implementation
is single-process).  Exit codes: 0 success, 2 configuration error, 3 solver
non-convergence.

CSV schemas:
    exact        i, x, phi
    solve        i, x, phi, eta, a_star       (a_star blank for neutral runs)
    converge     M, err_phi, err_H, rate_phi, rate_H   (rates blank on the
                 coarsest row and for non-doubling pairs)
    alpha-sweep  param, H, x_bar, has_threshold
    gamma-sweep  param, H, x_bar, has_threshold
    simulate     t, x, event, cost_increment  (event dump of path 0)
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .experiments import (
    Config,
    ConfigError,
    converge_rows,
    load_config,
    run_alpha_sweep,
    run_converge,
    run_exact,
    run_gamma_sweep,
    run_simulate,
    run_solve,
    write_csv,
)
from .sweep import NonConvergenceError

_SWEEP_HEADER = ("param", "H", "x_bar", "has_threshold")
_CONVERGE_HEADER = ("M", "err_phi", "err_H", "rate_phi", "rate_H")


def _emit(summary) -> None:
    print(json.dumps(summary, indent=2, sort_keys=True))


def _sweep_csv_rows(records):
    return [(r.param, r.h_value, r.x_bar, r.has_threshold) for r in records]


def cmd_exact(cfg: Config, out: str | None) -> None:
    summary, rows = run_exact(cfg)
    if out:
        write_csv(out, ("i", "x", "phi"), rows)
    _emit(summary)


def cmd_solve(cfg: Config, out: str | None) -> None:
    summary, rows, _, _ = run_solve(cfg)
    if out:
        write_csv(out, ("i", "x", "phi", "eta", "a_star"), rows)
    _emit(summary)


def cmd_converge(cfg: Config, out: str | None) -> None:
    def on_partial(partial):
        if out:
            write_csv(out, _CONVERGE_HEADER, converge_rows(partial))

    report = run_converge(cfg, on_partial=on_partial)
    if out:
        write_csv(out, _CONVERGE_HEADER, converge_rows(report))
    _emit(
        [
            {"m": m, "err_phi": ep, "err_h": eh, "rate_phi": rp, "rate_h": rh}
            for m, ep, eh, rp, rh in converge_rows(report)
        ]
    )


def cmd_alpha_sweep(cfg: Config, out: str | None) -> None:
    records = run_alpha_sweep(cfg)
    if out:
        write_csv(out, _SWEEP_HEADER, _sweep_csv_rows(records))
    _emit([dataclasses.asdict(r) for r in records])


def cmd_gamma_sweep(cfg: Config, out: str | None) -> None:
    records = run_gamma_sweep(cfg)
    if out:
        write_csv(out, _SWEEP_HEADER, _sweep_csv_rows(records))
    _emit([dataclasses.asdict(r) for r in records])


def cmd_simulate(cfg: Config, out: str | None) -> None:
    if out:
        stats, rows = run_simulate(cfg, record_path=True)
        write_csv(out, ("t", "x", "event", "cost_increment"), rows)
    else:
        stats = run_simulate(cfg)
    _emit(dataclasses.asdict(stats))


_COMMANDS = {
    "exact": cmd_exact,
    "solve": cmd_solve,
    "converge": cmd_converge,
    "alpha-sweep": cmd_alpha_sweep,
    "gamma-sweep": cmd_gamma_sweep,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sedstore",
        description="Ergodic control of a jump-driven storage process: "
        "solver, closed form, robust variant and Monte Carlo validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="flat key=value config file")
        p.add_argument("--out", default=None, help="write the command's CSV here")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--threads", type=int, default=None,
            help="parallelism hint; accepted for compatibility, never affects results",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        _COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 3
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
