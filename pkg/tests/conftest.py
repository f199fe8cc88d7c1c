"""Shared fixtures: cached end-to-end runs and the acceptance summary."""

import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pii_lab.harness import RunConfig, run_connection_experiment  # noqa: E402

ACCEPTANCE_PAIRS = ((0.0, 3.0), (0.5, 2.0), (1.5, 1.5))

# wall-clock seconds of the one real integration behind each cached report
RUN_SECONDS = {}


@lru_cache(maxsize=None)
def connection_report(alpha: float, k: float, tol: float = 1e-10):
    start = time.perf_counter()
    report = run_connection_experiment(RunConfig(alpha=alpha, k=k, tol=tol))
    RUN_SECONDS[(alpha, k, tol)] = time.perf_counter() - start
    return report


@pytest.fixture(scope="session")
def experiment():
    """Callable ``(alpha, k) -> ConnectionReport``; each pair integrates once per session."""
    return connection_report


@pytest.fixture
def record_criterion(request):
    """Record a one-line acceptance verdict, echoed in the terminal summary."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", {})

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
