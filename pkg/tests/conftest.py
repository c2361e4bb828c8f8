import numpy as np
import pytest
from hypothesis import settings

from resmeta import operators as ops
from resmeta.iterations import Scenario
from resmeta.schedules import builtin

settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")


@pytest.fixture
def line_scenario():
    """A = B = identity on the line, harmonic relaxation, u = x0 = 1."""
    return Scenario(ops.LinearPSD(np.eye(1)), ops.LinearPSD(np.eye(1)), [1.0], [1.0], builtin("harmonic", 1), name="r1-linear")


@pytest.fixture
def zero_scenario():
    return Scenario(ops.Zero(2), ops.Zero(2), [0.0, 0.0], [0.0, 0.0], builtin("harmonic", 1), q=[0.0, 0.0], name="zero")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
