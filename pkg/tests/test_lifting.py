from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liplift import arith
from liplift.errors import BaseNotPreserved, DimensionMismatch, EqualPoints, SpaceMismatch
from liplift.fixtures import random_bijection, random_function, random_operator, random_space
from liplift.free_space import free_norm, pairing
from liplift.lifting import (
    LiftingMatrix,
    LipOperator,
    adjoint_molecule,
    build_lifting,
    commutation_residuals,
    composition_lifting,
    composition_operator,
    continuity_bound,
    continuity_modulus_check,
    lifting_norm,
    operator_norm,
    operator_norm_witness,
    sampled_operator_norm,
    unit_ball_residual_bound,
    verify_commutation,
)
from liplift.lipschitz import apply_de_leeuw, function_from, lip_norm
from liplift.metric_space import gen_ultrametric_cube
from conftest import equilateral, path, two_point
from oracles import free_norm_oracle


def identity(space):
    return LipOperator(space, space, arith.as_array(np.eye(space.dim), space.exact))


def scalar(space, r):
    return LipOperator(space, space, arith.as_array(np.eye(space.dim), space.exact) * r)


def closed_form_norm(gamma, r, M, N):
    """|r| * sup d_M(gamma x, gamma y) / d_N(x, y), by direct enumeration."""
    return abs(r) * max(
        (M.dist[gamma[x], gamma[y]] / N.dist[x, y] for x, y in N.pairs),
        default=0,
    )


# -- operator norm -------------------------------------------------------------


def test_identity_norm(exact):
    for sp in (two_point(1, exact), equilateral(3, exact), path([1, 2], exact)):
        assert operator_norm(identity(sp)) == pytest.approx(1, abs=1e-9)


def test_scalar_and_zero_norm():
    sp = equilateral(4, True)
    assert operator_norm(scalar(sp, Fraction(-3, 2))) == Fraction(3, 2)
    assert operator_norm(scalar(sp, 0)) == 0


def test_adjoint_molecule_two_point():
    sp = two_point(1)
    S = scalar(sp, 2.0)
    assert adjoint_molecule(S, "a", "0").coeffs.tolist() == [2.0]
    assert adjoint_molecule(S, "0", "a").coeffs.tolist() == [-2.0]
    with pytest.raises(EqualPoints):
        adjoint_molecule(S, "a", "a")


def test_adjoint_molecule_is_adjoint(rational_spaces):
    rng = np.random.default_rng(2)
    spaces = [s for s in rational_spaces.values() if s.n >= 2]
    for M, N in zip(spaces, spaces[1:] + spaces[:1]):
        S = random_operator(M, N, rng)
        f = random_function(M, rng)
        Sf = S(f)
        for p, q in N.pairs:
            assert pairing(adjoint_molecule(S, p, q), f) == (Sf.at(p) - Sf.at(q)) / N.dist[p, q]


def test_norm_matches_vertex_enumeration():
    rng = np.random.default_rng(31)
    for _ in range(15):
        M = random_space(int(rng.integers(2, 5)), rng, True)
        N = random_space(int(rng.integers(2, 5)), rng, True)
        S = random_operator(M, N, rng)
        expect = max(
            free_norm_oracle(M.dist.tolist(), M.base_index, list(adjoint_molecule(S, p, q).coeffs))
            for p, q in N.pairs
        )
        assert operator_norm(S) == expect


def test_norm_witness_attains(exact):
    rng = np.random.default_rng(8)
    for _ in range(10):
        M, N = random_space(4, rng, exact), random_space(3, rng, exact)
        S = random_operator(M, N, rng)
        norm, pair, f = operator_norm_witness(S)
        assert lip_norm(f) <= 1 + (0 if exact else 1e-9)
        assert abs(lip_norm(S(f)) - norm) <= (0 if exact else 1e-9)
        assert pair in N.pairs.index


def test_operator_shape_checks():
    M, N = two_point(1), equilateral(3)
    with pytest.raises(DimensionMismatch):
        LipOperator(M, N, np.zeros((1, 2)))
    with pytest.raises(SpaceMismatch):
        LipOperator(M, two_point(1, True), np.zeros((1, 1)))
    with pytest.raises(SpaceMismatch):
        LipOperator(M, N, np.zeros((2, 1)))(function_from(N, {}))


# -- lifting --------------------------------------------------------------------


def test_identity_lifting(exact):
    sp = equilateral(3, exact)
    S = identity(sp)
    L = build_lifting(S)
    assert lifting_norm(L) == pytest.approx(1, abs=1e-9)
    assert verify_commutation(S, L) <= (0 if exact else 1e-9)


def test_scalar_lifting():
    sp = path([1, 2], True)
    S = scalar(sp, Fraction(-2))
    L = build_lifting(S)
    assert lifting_norm(L) == 2
    assert verify_commutation(S, L) == 0


def test_zero_lifting_fails_for_nonzero_operator():
    sp = equilateral(3, True)
    S = identity(sp)
    L = LiftingMatrix(sp, sp, arith.zeros((6, 6), True))
    assert verify_commutation(S, L) > 0
    assert unit_ball_residual_bound(S, L) > 0


def test_lifting_shape_check():
    sp = equilateral(3)
    with pytest.raises(DimensionMismatch):
        LiftingMatrix(sp, sp, np.zeros((6, 5)))
    with pytest.raises(DimensionMismatch):
        commutation_residuals(identity(sp), build_lifting(identity(equilateral(3))))


def test_lifting_measure_and_apply():
    sp = two_point(1, True)
    L = build_lifting(scalar(sp, 3))
    assert L.measure("a", "0") == {(1, 0): 3}
    F = arith.as_array([5, 7], True)
    # columns (0,a), (a,0); row (0,a) sees -3 * m_a0 = 3 * m_0a
    assert list(L.apply(F)) == [15, 21]


def test_lifting_rows_are_representations(exact):
    rng = np.random.default_rng(12)
    M, N = random_space(4, rng, exact), random_space(4, rng, exact)
    S = random_operator(M, N, rng)
    L = build_lifting(S)
    tol = 0 if exact else 1e-9
    for r, (p, q) in enumerate(N.pairs):
        h = adjoint_molecule(S, p, q)
        assert abs(L.row_norms[r] - free_norm(h)) <= tol


def test_workers_do_not_change_result():
    rng = np.random.default_rng(13)
    M, N = random_space(5, rng, True), random_space(4, rng, True)
    S = random_operator(M, N, rng)
    a, b = build_lifting(S), build_lifting(S, workers=4)
    assert (a.matrix == b.matrix).all()


def test_epsilon_recorded():
    L = build_lifting(identity(two_point(1, True)), epsilon="1/10")
    assert L.epsilon == Fraction(1, 10)
    with pytest.raises(ValueError):
        build_lifting(identity(two_point(1)), epsilon=-1)


def test_rank():
    sp = equilateral(3, True)
    assert build_lifting(identity(sp)).rank() >= 1
    assert LiftingMatrix(sp, sp, arith.zeros((6, 6), True)).rank() == 0
    assert build_lifting(identity(equilateral(3))).rank() >= 1


def test_one_point_spaces():
    pt = random_space(1, np.random.default_rng(0), True)
    sp = equilateral(3, True)
    for S in (LipOperator(pt, sp, []), LipOperator(sp, pt, []), LipOperator(pt, pt, [])):
        L = build_lifting(S)
        assert operator_norm(S) == 0
        assert lifting_norm(L) == 0
        assert verify_commutation(S, L) == 0
        assert continuity_modulus_check(S, 5, 0) <= 0


# -- composition operators -----------------------------------------------------


def test_composition_doubling():
    N, M = two_point(1, True), two_point(2, True)
    S = composition_operator([0, 1], 1, M, N)
    L = composition_lifting([0, 1], 1, M, N)
    assert operator_norm(S) == 2
    assert lifting_norm(L) == 2
    assert verify_commutation(S, L) == 0


def test_composition_to_base_is_zero():
    sp = equilateral(3, True)
    S = composition_operator([0, 0, 0], 5, sp, sp)
    assert operator_norm(S) == 0
    assert lifting_norm(composition_lifting([0, 0, 0], 5, sp, sp)) == 0


def test_composition_requires_base():
    sp = equilateral(3)
    with pytest.raises(BaseNotPreserved):
        composition_operator([1, 0, 2], 1, sp, sp)


def test_composition_bijections(exact):
    rng = np.random.default_rng(17)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        M, N = random_space(n, rng, exact), random_space(n, rng, exact)
        gamma = random_bijection(n, rng)
        r = Fraction(-3, 2) if exact else -1.5
        S = composition_operator(gamma, r, M, N)
        L = composition_lifting(gamma, r, M, N)
        tol = 0 if exact else 1e-9
        assert verify_commutation(S, L) <= tol
        expect = closed_form_norm(gamma, r, M, N)
        assert abs(lifting_norm(L) - expect) <= tol
        assert abs(operator_norm(S) - expect) <= tol
        assert lifting_norm(build_lifting(S)) <= expect + tol


def test_composition_non_injective():
    # collapsing two points of N onto one point of M leaves a zero row
    N = equilateral(3, True)
    M = two_point(1, True)
    gamma = [0, 1, 1]
    S = composition_operator(gamma, 1, M, N)
    L = composition_lifting(gamma, 1, M, N)
    assert verify_commutation(S, L) == 0
    assert L.measure("a", "b") == {}
    assert lifting_norm(L) == operator_norm(S) == 1


# -- continuity estimate ---------------------------------------------------------


def test_continuity_bound_vanishes_on_same_pair():
    sp = path([1, 2], True)
    assert continuity_bound(sp, 3, (1, 2), (1, 2)) == 0


def test_continuity_check(exact):
    rng = np.random.default_rng(41)
    for _ in range(5):
        M, N = random_space(4, rng, exact), random_space(4, rng, exact)
        S = random_operator(M, N, rng)
        assert continuity_modulus_check(S, 100, 7) <= (0 if exact else 1e-9)


def test_continuity_detects_understated_norm():
    # with a norm of 0 the bound collapses and any nonzero difference violates it
    sp = path([1, 2], True)
    S = scalar(sp, 1)
    assert continuity_modulus_check(S, 200, 0, opnorm=0) > 0


def test_sampled_norm_on_cubes():
    rng = np.random.default_rng(5)
    M, N = gen_ultrametric_cube(2, True), gen_ultrametric_cube(2, True)
    S = random_operator(M, N, rng)
    assert sampled_operator_norm(S, 100, rng) <= operator_norm(S)


@settings(max_examples=30, deadline=None)
@given(m=st.integers(1, 5), n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1), exact=st.booleans())
def test_lifting_invariants(m, n, seed, exact):
    rng = np.random.default_rng(seed)
    M, N = random_space(m, rng, exact), random_space(n, rng, exact)
    S = random_operator(M, N, rng)
    L = build_lifting(S)
    tol = 0 if exact else 1e-8
    norm = operator_norm(S)
    assert verify_commutation(S, L) <= tol
    assert abs(lifting_norm(L) - norm) <= tol
    # any unit-ball sample is a lower bound for the norm
    assert sampled_operator_norm(S, 20, rng) <= norm + tol
    # commutation on an arbitrary f, not just the basis
    f = random_function(M, rng)
    lhs = L.apply(apply_de_leeuw(f)) if len(N.pairs) else arith.zeros(0, exact)
    assert arith.max_abs(lhs - apply_de_leeuw(S(f))) <= (0 if exact else 1e-8 * max(1, lip_norm(f)) * (1 + norm))
