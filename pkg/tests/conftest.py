import os
import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conicsens.cones import Cone, Orthant, SecondOrder  # noqa: E402
from conicsens.problem import ConicProgram  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


@pytest.fixture
def fixtures_dir():
    return pathlib.Path(FIXTURES)


@pytest.fixture
def soc_example():
    """min x1 s.t. (1, x2, x1) in the 3-d ice cream cone; v = 1."""
    return ConicProgram([[0, 0], [0, 1], [1, 0]], [-1, 0, 0], [1, 0],
                        Cone((SecondOrder(3),)))


@pytest.fixture
def soc_unattained():
    """min x s.t. (x, 0, 1) in the ice cream cone; v = -1."""
    return ConicProgram([[1], [0], [0]], [0, 0, -1], [1], Cone((SecondOrder(3),)))


@pytest.fixture
def unbounded_solutions():
    """Orthant program with S(P) = {1} x R."""
    return ConicProgram([[1, 0], [0, 0]], [1, -1], [1, 0], Cone((Orthant(2),)))


@pytest.fixture
def box_lp():
    """min x1 + x2 s.t. x >= (1, 2)."""
    return ConicProgram(np.eye(2), [1, 2], [1, 1], Cone((Orthant(2),)))


@pytest.fixture
def empty_lp():
    """x >= 1 and -x >= 1: no feasible point."""
    return ConicProgram([[1], [-1]], [1, 1], [1], Cone((Orthant(2),)))


_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_") and (report.when == "call" or report.failed):
        _CRITERIA.setdefault(name, "PASS")
        if report.failed:
            _CRITERIA[name] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split("_")[2])):
        terminalreporter.write_line(f"criterion {name.split('_')[2]}: {_CRITERIA[name]}")
