import time

import numpy as np
import pytest

from nahmrat import BWPair

# (criterion, passed, detail) appended by test_acceptance.py
ACCEPTANCE_LINES = []
RUNTIME_BUDGET = 60.0
_started = []


def pytest_sessionstart(session):
    _started.append(time.perf_counter())


def random_poles(rng, k, min_sep=0.25, box=2.0):
    while True:
        b = rng.uniform(-box, box, k) + 1j * rng.uniform(-box, box, k)
        if k == 1 or np.min(np.abs(b[:, None] - b[None, :]) + 10 * np.eye(k)) > min_sep:
            return b


def random_diagonal_pair(rng, k):
    b = random_poles(rng, k)
    W = rng.uniform(0.5, 1.5, k) * np.exp(1j * rng.uniform(0, 2 * np.pi, k))
    return BWPair(np.diag(b), W)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda x: x[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {detail}")
    elapsed = time.perf_counter() - _started[0]
    verdict = "PASS" if elapsed < RUNTIME_BUDGET else "FAIL"
    terminalreporter.write_line(f"[{verdict}] runtime: session took {elapsed:.1f} s (target < {RUNTIME_BUDGET:.0f} s)")
