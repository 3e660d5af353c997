import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liplift.errors import (
    AsymmetricMatrix,
    CapExceeded,
    InvalidSpace,
    NegativeDistance,
    NonZeroDiagonal,
    TriangleViolation,
    ZeroDistanceDistinctPoints,
)
from liplift.fixtures import random_space
from liplift.metric_space import (
    CAP_ENV,
    ULTRAMETRIC_FIRST_INDEX,
    gen_ultrametric_cube,
    metric_axiom_witness,
    new_space,
    pair_set,
    ultrametric_witness,
)
from oracles import metric_violations, ultrametric_distance


def test_two_point_space():
    sp = new_space(["0", "a"], [[0, 1], [1, 0]], 0)
    assert sp.n == 2 and sp.base_label == "0"
    assert sp.nonbase == (1,)
    assert sp.d("0", "a") == 1


def test_triangle_violation_witness():
    with pytest.raises(TriangleViolation) as exc:
        new_space(["0", "a", "b"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]], 0)
    # d(0,2) = 3 exceeds the route through point 1
    assert exc.value.witness == (0, 2, 1)


def test_asymmetric():
    with pytest.raises(AsymmetricMatrix) as exc:
        new_space(["0", "a"], [[0, 1], [2, 0]], 0)
    assert exc.value.witness == (0, 1)


@pytest.mark.parametrize(
    "dist, err",
    [
        ([[0, -1], [-1, 0]], NegativeDistance),
        ([[0, 0], [0, 0]], ZeroDistanceDistinctPoints),
        ([[1, 1], [1, 0]], NonZeroDiagonal),
    ],
)
def test_axiom_errors(dist, err):
    with pytest.raises(err):
        new_space(["0", "a"], dist, 0)


@pytest.mark.parametrize(
    "labels, dist, base",
    [
        (["0", "0"], [[0, 1], [1, 0]], 0),
        (["0", "a"], [[0, 1], [1, 0]], 2),
        (["0", "a", "b"], [[0, 1], [1, 0]], 0),
        (["0", "a b"], [[0, 1], [1, 0]], 0),
    ],
)
def test_invalid_structure(labels, dist, base):
    with pytest.raises(InvalidSpace):
        new_space(labels, dist, base)


def test_rational_mode_is_exact():
    sp = new_space(["0", "a"], [[0, Fraction(1, 3)], [Fraction(1, 3), 0]], 0)
    assert sp.exact
    assert sp.d(0, 1) == Fraction(1, 3)
    assert not sp.with_mode("float").exact


def test_space_is_immutable():
    sp = new_space(["0", "a"], [[0, 1], [1, 0]], 0)
    with pytest.raises(ValueError):
        sp.dist[0, 1] = 5


def test_pair_set_small():
    sp = new_space(["0", "a"], [[0, 1], [1, 0]], 0)
    assert list(pair_set(sp)) == [(0, 1), (1, 0)]
    three = new_space(["0", "a", "b"], np.ones((3, 3)) - np.eye(3), 0)
    assert list(pair_set(three)) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


def test_pair_set_one_point():
    sp = new_space(["0"], [[0]], 0)
    assert len(pair_set(sp)) == 0
    assert sp.dim == 0


@pytest.mark.parametrize("n", range(1, 7))
def test_pair_set_invariants(n):
    sp = random_space(n, np.random.default_rng(n))
    ps = pair_set(sp)
    assert len(ps) == n * (n - 1)
    assert list(ps) == sorted(ps)
    assert all((j, i) in ps.index for i, j in ps)
    assert all(ps[ps.index[p]] == p for p in ps)


def test_cube_depth_one():
    sp = gen_ultrametric_cube(1)
    assert sp.n == 2
    assert sp.d(0, 1) == 0.5


def test_cube_depth_two_matches_formula():
    sp = gen_ultrametric_cube(2, exact=True)
    assert sp.labels == ("00", "01", "10", "11")
    assert sp.base_label == "00"
    assert sp.d("00", "01") == Fraction(1, 4)
    assert sp.d("00", "10") == Fraction(1, 2)
    assert sp.d("01", "10") == Fraction(1, 2)
    for a, b in itertools.combinations(sp.labels, 2):
        assert sp.d(a, b) == ultrametric_distance(a, b)


def test_cube_first_index_constant():
    assert ULTRAMETRIC_FIRST_INDEX == 1
    assert max(gen_ultrametric_cube(3, exact=True).dist.ravel()) == Fraction(1, 2)


@pytest.mark.parametrize("depth", range(1, 7))
def test_cube_is_ultrametric(depth):
    sp = gen_ultrametric_cube(depth)
    assert ultrametric_witness(sp) is None
    assert min(sp.dist[0, 1:]) == 2.0**-depth


def test_cube_cap(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "8")
    gen_ultrametric_cube(3)
    with pytest.raises(CapExceeded):
        gen_ultrametric_cube(4)


def test_cube_bad_depth():
    with pytest.raises(InvalidSpace):
        gen_ultrametric_cube(0)


def test_ultrametric_witness_on_path():
    # a path with gaps 1, 1 is metric but not ultrametric: d(0,2)=2 > max(1,1)
    sp = new_space(["0", "a", "b"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]], 0)
    assert ultrametric_witness(sp) == (0, 1, 2)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1), exact=st.booleans())
def test_generated_spaces_pass_independent_validator(n, seed, exact):
    sp = random_space(n, np.random.default_rng(seed), exact)
    assert metric_axiom_witness(sp) is None
    if exact:
        assert metric_violations(sp.dist.tolist()) == []


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=9, max_size=9))
def test_validation_agrees_with_oracle(entries):
    # random symmetric integer matrices: new_space accepts exactly the oracle-valid ones
    d = np.zeros((3, 3), dtype=object)
    it = iter(entries)
    for i, j in itertools.combinations(range(3), 2):
        d[i, j] = d[j, i] = Fraction(next(it))
    valid = metric_violations(d.tolist()) == []
    try:
        new_space(["0", "a", "b"], d, 0, exact=True)
        accepted = True
    except ValueError:
        accepted = False
    assert accepted == valid
