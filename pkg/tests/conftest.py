from fractions import Fraction

import numpy as np
import pytest

from liplift.fixtures import random_space, scaled_space
from liplift.metric_space import gen_ultrametric_cube, new_space

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def two_point(d=1, exact=False):
    return new_space(["0", "a"], [[0, d], [d, 0]], 0, exact=exact)


def equilateral(n=3, exact=False):
    labels = ["0", "a", "b", "c", "d", "e"][:n]
    dist = np.ones((n, n)) - np.eye(n)
    return new_space(labels, dist, 0, exact=exact)


def path(lengths, exact=False):
    """Points on a line at consecutive gaps ``lengths``; base at the left end."""
    pos = np.concatenate([[0], np.cumsum(lengths)])
    dist = np.abs(pos[:, None] - pos[None, :])
    labels = ["0"] + [f"x{i}" for i in range(1, len(pos))]
    return new_space(labels, dist, 0, exact=exact)


def star(arms, exact=False):
    """Base at the centre, arm lengths ``arms``, leaves joined through the centre."""
    k = len(arms)
    r = [0] + list(arms)
    dist = [[0 if i == j else r[i] + r[j] for j in range(k + 1)] for i in range(k + 1)]
    return new_space(["0"] + [f"s{i}" for i in range(1, k + 1)], dist, 0, exact=exact)


def catalog(exact=False):
    """Hand-built fixture spaces plus a few seeded random ones."""
    spaces = {
        "point": new_space(["0"], [[0]], 0, exact=exact),
        "two_point": two_point(1, exact),
        "two_point_d2": two_point(2, exact),
        "equilateral3": equilateral(3, exact),
        "equilateral4": equilateral(4, exact),
        "path3": path([1, 2], exact),
        "path4": path([1, 0.5, 2], exact),
        "star4": star([1, 2, 3], exact),
        "cube1": gen_ultrametric_cube(1, exact),
        "cube2": gen_ultrametric_cube(2, exact),
        "base_in_middle": new_space(["a", "0", "b"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]], 1, exact=exact),
    }
    rng = np.random.default_rng(2024)
    for n in (3, 4, 4, 5):
        spaces[f"random{n}_{len(spaces)}"] = random_space(n, rng, exact)
    spaces["scaled_path3"] = scaled_space(spaces["path3"], Fraction(5, 2) if exact else 2.5)
    return spaces


@pytest.fixture(scope="session")
def float_spaces():
    return catalog(False)


@pytest.fixture(scope="session")
def rational_spaces():
    return catalog(True)


@pytest.fixture(params=["float", "rational"])
def exact(request):
    return request.param == "rational"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
