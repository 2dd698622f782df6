from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Record and print one pass/fail line per acceptance criterion."""

    def emit(criterion: str, value, tolerance, passed: bool) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  [{criterion}] value={value} tolerance={tolerance}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
