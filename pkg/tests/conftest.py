import sys

import pytest

from atomdot.tf_atom import solve_tf_atom
from atomdot.tf_dot import ConfinementSpec, solve_tf_dot_radial


@pytest.fixture(scope="session")
def neutral():
    return solve_tf_atom(1.0)


@pytest.fixture(scope="session")
def ion():
    return solve_tf_atom(0.7)


@pytest.fixture(scope="session")
def dot_r2():
    return solve_tf_dot_radial(ConfinementSpec.power_law(2))


@pytest.fixture(scope="session")
def dot_r4():
    return solve_tf_dot_radial(ConfinementSpec.power_law(4))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
