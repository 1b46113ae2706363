"""Shared fixtures and the acceptance-criteria summary hook."""
import re

import pytest

from sedstore import exact, levy

# Populated by tests/test_acceptance.py at import time: {number: title}.
ACCEPTANCE_TITLES = {}

_CRITERION_RE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION_RE.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call":
        _outcomes[num] = ("PASS" if report.passed else "FAIL", report.duration)
    elif report.when == "setup" and report.skipped:
        _outcomes[num] = ("SKIP", 0.0)
    elif report.when == "setup" and report.failed:
        _outcomes[num] = ("FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_outcomes):
        verdict, dur = _outcomes[num]
        title = ACCEPTANCE_TITLES.get(num, "")
        tr.write_line(f"criterion {num}: {verdict} — {title} ({dur:.1f}s)")


@pytest.fixture(scope="session")
def table_params():
    """Validation-study parameter set (c, d, mu, Lambda) = (0.15, 0.05, 0.1, 0.25)."""
    return exact.ControlParams(
        c=0.15, d=0.05, mu=0.1, capital_lambda=0.25, action_set=exact.ActionSet.XI2
    )


@pytest.fixture(scope="session")
def half_stable():
    """alpha = 0.5, lambda = 0.2 stable model used throughout the study."""
    return levy.stable_model(alpha=0.5, lam=0.2)
