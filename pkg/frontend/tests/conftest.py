"""Acceptance reporting for the plotting package."""

import pytest

_RESULTS = {}


@pytest.fixture
def acceptance_record():
    def record(criterion: int, passed: bool, detail: str = ""):
        _RESULTS[criterion] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        passed, detail = _RESULTS[k]
        line = f"criterion {k} [plotting]: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
