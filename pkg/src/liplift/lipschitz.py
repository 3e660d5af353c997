"""Elements of Lip_0(M), Lipschitz norms and the De Leeuw embedding.

A function is stored by its values at the non-base points, in the order
of ``space.nonbase``; the value at the base point is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import arith
from .errors import BaseNotPreserved, SpaceMismatch


@dataclass(frozen=True, eq=False)
class LipschitzFunction:
    space: object
    values: np.ndarray

    def __post_init__(self):
        v = arith.as_array(self.values, self.space.exact).reshape(-1)
        if len(v) != self.space.dim:
            raise SpaceMismatch(f"{len(v)} values for a space with {self.space.dim} non-base points")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def at(self, point):
        """Value at a point (index or label); 0 at the base point."""
        i = self.space.index(point)
        if i == self.space.base_index:
            return arith.zeros((), self.space.exact)[()]
        return self.values[self.space.slot[i]]

    def full(self):
        """Values at every point, base included, indexed by point index."""
        out = arith.zeros(self.space.n, self.space.exact)
        out[list(self.space.nonbase)] = self.values
        return out

    def __add__(self, other):
        _same_space(self.space, other.space)
        return LipschitzFunction(self.space, self.values + other.values)

    def __mul__(self, alpha):
        return LipschitzFunction(self.space, self.values * alpha)

    __rmul__ = __mul__

    def __neg__(self):
        return LipschitzFunction(self.space, -self.values)


def _same_space(a, b):
    if a is not b:
        raise SpaceMismatch("objects live on different spaces")


def function_from(space, mapping):
    """Build a function from ``{label_or_index: value}``; missing points are 0."""
    values = arith.zeros(space.dim, space.exact)
    for point, v in mapping.items():
        i = space.index(point)
        if i == space.base_index:
            if v != 0:
                raise BaseNotPreserved(f"value {v} at the base point {space.base_label}")
            continue
        values[space.slot[i]] = arith.to_fraction(v) if space.exact else float(v)
    return LipschitzFunction(space, values)


def basis_function(space, point):
    """The point-evaluation basis vector e_z (1 at z, 0 elsewhere)."""
    i = space.index(point)
    values = arith.zeros(space.dim, space.exact)
    values[space.slot[i]] = 1
    return LipschitzFunction(space, values)


def apply_de_leeuw(f, space=None):
    """Difference quotients ``(f(x) - f(y)) / d(x, y)`` over the pair set."""
    if space is not None:
        _same_space(space, f.space)
    sp = f.space
    if not sp.pairs.pairs:
        return arith.zeros(0, sp.exact)
    full = f.full()
    idx = np.array(sp.pairs.pairs)
    x, y = idx[:, 0], idx[:, 1]
    return (full[x] - full[y]) / sp.dist[x, y]


def lip_norm(f):
    """Best Lipschitz constant of ``f``; 0 on the one-point space."""
    return arith.max_abs(apply_de_leeuw(f))


@dataclass(frozen=True, eq=False)
class DeLeeuwMatrix:
    """Rows follow ``space.pairs``; columns follow ``space.nonbase``."""

    space: object
    matrix: np.ndarray

    def __matmul__(self, values):
        return self.matrix @ values

    @property
    def shape(self):
        return self.matrix.shape


def de_leeuw_matrix(space):
    """Explicit matrix of the De Leeuw map on value vectors.

    Row ``(x, y)`` has ``+1/d(x,y)`` in column ``x`` and ``-1/d(x,y)`` in
    column ``y``, omitting the base point.  The one-point space gives an
    empty ``0 x 0`` matrix.
    """
    D = arith.zeros((len(space.pairs), space.dim), space.exact)
    one = arith.one(space.exact)
    for r, (x, y) in enumerate(space.pairs):
        w = one / space.dist[x, y]
        if x != space.base_index:
            D[r, space.slot[x]] = w
        if y != space.base_index:
            D[r, space.slot[y]] = -w
    D.setflags(write=False)
    return DeLeeuwMatrix(space, D)


def composition_function_map(gamma, r, f, codomain):
    """``p -> r * f(gamma(p))`` for a base-preserving point map ``gamma: N -> M``.

    ``gamma`` is a sequence (``gamma[p]`` is a point of ``f.space`` for
    each point index ``p`` of ``codomain``) or a mapping keyed by labels.
    """
    g = resolve_point_map(gamma, codomain, f.space)
    full = f.full()
    vals = [full[g[p]] * r for p in codomain.nonbase]
    return LipschitzFunction(codomain, arith.as_array(vals, codomain.exact) if vals else arith.zeros(0, codomain.exact))


def resolve_point_map(gamma, source, target):
    """Normalise ``gamma: source -> target`` to a tuple of target indices."""
    if isinstance(gamma, dict):
        g = [None] * source.n
        for p, z in gamma.items():
            g[source.index(p)] = target.index(z)
        g[source.base_index] = g[source.base_index] if g[source.base_index] is not None else target.base_index
        missing = [source.labels[p] for p, z in enumerate(g) if z is None]
        if missing:
            raise KeyError(f"point map undefined at {', '.join(missing)}")
    else:
        if len(gamma) != source.n:
            raise SpaceMismatch(f"point map has {len(gamma)} entries for {source.n} points")
        g = [target.index(z) for z in gamma]
    if g[source.base_index] != target.base_index:
        raise BaseNotPreserved(
            f"base {source.base_label} maps to {target.labels[g[source.base_index]]}, "
            f"not {target.base_label}"
        )
    return tuple(g)
