"""The Lipschitz-free space F(M) = Lip_0(M)* of a finite pointed space.

Elements are stored in point-evaluation coordinates: ``coeffs[k]`` is the
weight of ``delta_z`` for ``z = space.nonbase[k]``.  The free norm is
computed two ways, as a maximum over the Lipschitz unit ball and as the
cheapest molecular decomposition; their agreement is LP strong duality.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import arith, lp_core
from .errors import EqualPoints, NoPreimage, SpaceMismatch
from .lipschitz import LipschitzFunction, de_leeuw_matrix


@dataclass(frozen=True, eq=False)
class FreeVector:
    space: object
    coeffs: np.ndarray

    def __post_init__(self):
        c = arith.as_array(self.coeffs, self.space.exact).reshape(-1)
        if len(c) != self.space.dim:
            raise SpaceMismatch(f"{len(c)} coefficients for a space with {self.space.dim} non-base points")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other):
        if other.space is not self.space:
            raise SpaceMismatch("free vectors live on different spaces")
        return FreeVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, alpha):
        return FreeVector(self.space, self.coeffs * alpha)

    __rmul__ = __mul__

    def __neg__(self):
        return FreeVector(self.space, -self.coeffs)


@dataclass(frozen=True, eq=False)
class MoleculeDecomposition:
    """``sum_(x,y) coefficients[k] * m_xy`` over ``space.pairs``."""

    space: object
    coefficients: np.ndarray
    l1_value: object

    def evaluate(self):
        """The free vector this decomposition represents."""
        return FreeVector(self.space, molecule_matrix(self.space) @ self.coefficients)


def zero(space):
    return FreeVector(space, arith.zeros(space.dim, space.exact))


def dirac(space, point):
    """delta_z; the zero vector when z is the base point."""
    i = space.index(point)
    c = arith.zeros(space.dim, space.exact)
    if i != space.base_index:
        c[space.slot[i]] = 1
    return FreeVector(space, c)


def molecule(space, x, y):
    """Normalised elementary molecule ``f -> (f(x) - f(y)) / d(x, y)``."""
    i, j = space.index(x), space.index(y)
    if i == j:
        raise EqualPoints(f"molecule needs distinct points, got {space.labels[i]} twice")
    c = arith.zeros(space.dim, space.exact)
    w = arith.one(space.exact) / space.dist[i, j]
    if i != space.base_index:
        c[space.slot[i]] = w
    if j != space.base_index:
        c[space.slot[j]] = -w
    return FreeVector(space, c)


def pairing(mu, f):
    if mu.space is not f.space:
        raise SpaceMismatch("pairing a free vector with a function on another space")
    if not len(mu.coeffs):
        return arith.zeros((), mu.space.exact)[()]
    return mu.coeffs @ f.values


@lru_cache(maxsize=64)
def molecule_matrix(space):
    """Columns are the molecules ``m_xy`` in ``space.pairs`` order."""
    return de_leeuw_matrix(space).matrix.T


@lru_cache(maxsize=64)
def _unit_ball_constraints(space):
    # |f(x) - f(y)| <= d(x,y) as  f(x) - f(y) <= d(x,y)  over all ordered pairs
    idx = list(space.pairs)
    G = arith.zeros((len(idx), space.dim), space.exact)
    h = arith.zeros(len(idx), space.exact)
    for r, (x, y) in enumerate(idx):
        if x != space.base_index:
            G[r, space.slot[x]] = 1
        if y != space.base_index:
            G[r, space.slot[y]] = -1
        h[r] = space.dist[x, y]
    G.setflags(write=False)
    h.setflags(write=False)
    return G, h


def unit_ball_constraints(space):
    """``(G, h)`` with ``{f : G f <= h}`` the unit ball of Lip_0(M)."""
    return _unit_ball_constraints(space)


def free_norm_witness(mu, tol=arith.FLOAT_TOL):
    """``(norm, f)`` where ``f`` is a vertex of the unit ball attaining the norm."""
    sp = mu.space
    if sp.dim == 0:
        return arith.zeros((), sp.exact)[()], LipschitzFunction(sp, arith.zeros(0, sp.exact))
    G, h = unit_ball_constraints(sp)
    f, value = lp_core.max_linear(mu.coeffs, G, h, tol=tol)
    return value, LipschitzFunction(sp, f)


def free_norm(mu, tol=arith.FLOAT_TOL):
    """Kantorovich-Rubinstein norm ``max <mu, f>`` over ``lip_norm(f) <= 1``."""
    return free_norm_witness(mu, tol)[0]


def optimal_representation(mu, tol=arith.FLOAT_TOL):
    """Cheapest molecular decomposition of ``mu`` (minimum l1 coefficients).

    The optimum is not unique in general; Bland's rule fixes which basic
    optimum is returned.
    """
    sp = mu.space
    if sp.dim == 0:
        return MoleculeDecomposition(sp, arith.zeros(0, sp.exact), arith.zeros((), sp.exact)[()])
    try:
        a, value = lp_core.min_l1(molecule_matrix(sp), mu.coeffs, tol=tol)
    except NoPreimage as exc:  # molecules m_z0 span, so this is a broken invariant
        raise AssertionError("molecules failed to span the free space") from exc
    a.setflags(write=False)
    return MoleculeDecomposition(sp, a, value)


def duality_gap(mu, tol=arith.FLOAT_TOL):
    """``|free_norm(mu) - optimal_representation(mu).l1_value|``."""
    return abs(free_norm(mu, tol) - optimal_representation(mu, tol).l1_value)
