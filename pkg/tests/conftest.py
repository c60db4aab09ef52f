import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import shooting_oracle  # noqa: E402


@pytest.fixture(scope="session")
def oracle_profile():
    """``(x, v, slope)`` from the shooting oracle at alpha = chi = 1."""
    return shooting_oracle()


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one ``criterion: PASS/FAIL`` line, print it and assert on it."""

    def record(label, ok, detail=""):
        line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
