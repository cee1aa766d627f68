from __future__ import annotations

import sys

import pytest

from ncinv.groups import close

# Finite rational matrix groups on K^2 used throughout the suite.
GROUP_GENERATORS = {
    "trivial": [[[1, 0], [0, 1]]],
    "minus_identity": [[[-1, 0], [0, -1]]],
    "rotation4": [[[0, -1], [1, 0]]],
    "dihedral8": [[[0, -1], [1, 0]], [[1, 0], [0, -1]]],
    "klein": [[[-1, 0], [0, -1]], [[0, 1], [1, 0]]],
    "cyclic3": [[[0, -1], [1, -1]]],
    "symmetric3": [[[0, -1], [1, -1]], [[0, 1], [1, 0]]],
    "cyclic6": [[[1, -1], [1, 0]]],
}

ACCEPTANCE_GROUPS = ("trivial", "minus_identity", "rotation4", "dihedral8")


def group(name: str):
    return close(GROUP_GENERATORS[name])


@pytest.fixture(scope="session")
def groups():
    return {name: group(name) for name in GROUP_GENERATORS}


def pytest_terminal_summary(terminalreporter):
    """Print one line per acceptance criterion that ran."""
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 8):
        terminalreporter.write_line(mod.result_line(n))
