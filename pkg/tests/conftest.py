import numpy as np
import pytest

from algpot import parse_problem

CONE_TEXT = """\
vars q1 q2
ext w1 : w1^2 - q1^2 - q2^2
potential w1^3
"""

TRAP_TEXT = """\
vars q1 q2
ext w1 : w1^2 - q1
potential w1^5 + q2^2
"""

PLAIN_TEXT = """\
vars q1 q2
potential q1^2 + q2^2
"""


@pytest.fixture(scope="session")
def cone_setup():
    return parse_problem(CONE_TEXT, label="cone")


@pytest.fixture(scope="session")
def trap_setup():
    return parse_problem(TRAP_TEXT, label="trap")


@pytest.fixture(scope="session")
def plain_setup():
    return parse_problem(PLAIN_TEXT, label="plain")


@pytest.fixture()
def cone_file(tmp_path):
    path = tmp_path / "cone.prob"
    path.write_text(CONE_TEXT)
    return str(path)


@pytest.fixture()
def trap_file(tmp_path):
    path = tmp_path / "trap.prob"
    path.write_text(TRAP_TEXT)
    return str(path)


def on_cone(q1, q2, sign=1.0):
    """A point of the cone variety over (q1, q2)."""
    return np.array([q1, q2, sign * np.sqrt(complex(q1 * q1 + q2 * q2))],
                    dtype=complex)
