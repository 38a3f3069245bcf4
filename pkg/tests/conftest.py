import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from motive_forge.weights import AdmissiblePair  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def quintic():
    return AdmissiblePair(5, (1, 1, 1, 1, 1))


@pytest.fixture(scope="session")
def octic():
    return AdmissiblePair(8, (1, 1, 2, 2, 2))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
