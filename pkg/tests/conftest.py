"""Shared fixtures plus the acceptance-criteria reporting hook."""

from __future__ import annotations

import pytest

from beamsim.experiments import builtin_example

CRITERIA = {
    1: "two-matrix decomposition property suite",
    2: "similarity-problem relaxation tightness",
    3: "ellipsoid-problem checklist coverage",
    4: "brute-force oracle equivalence",
    5: "benchmark-line invariants",
    6: "phase-rotation equivalence",
    7: "example-1 trend reproduction",
    8: "example-4 robustness margin",
    9: "MVDR identities",
}

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance_record():
    def record(criterion: int, passed: bool, detail: str = ""):
        _RESULTS[criterion] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k, description in CRITERIA.items():
        if k in _RESULTS:
            passed, detail = _RESULTS[k]
            status = "PASS" if passed else "FAIL"
        else:
            status, detail = "NOT RUN", ""
        line = f"criterion {k} [{description}]: {status}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example1():
    return builtin_example(1)


@pytest.fixture(scope="session")
def example3():
    return builtin_example(3)


@pytest.fixture(scope="session")
def example4():
    return builtin_example(4)
