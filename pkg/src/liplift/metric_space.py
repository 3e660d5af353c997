"""Finite pointed metric spaces and their off-diagonal pair sets."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import arith
from .errors import (
    AsymmetricMatrix,
    CapExceeded,
    InvalidSpace,
    NegativeDistance,
    NonZeroDiagonal,
    TriangleViolation,
    ZeroDistanceDistinctPoints,
)

CAP_ENV = "LIPLIFT_MAX_POINTS"
DEFAULT_POINT_CAP = 256

# Coordinates of the ultrametric cube are numbered from this value, so the
# largest distance in the cube is 2**-ULTRAMETRIC_FIRST_INDEX.
ULTRAMETRIC_FIRST_INDEX = 1

# relative slack for the float-mode triangle check
TRIANGLE_RTOL = 1e-12


def point_cap():
    """Maximum number of points a generated space may have."""
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_POINT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidSpace(f"{CAP_ENV}={raw!r} is not an integer") from None
    if cap < 1:
        raise InvalidSpace(f"{CAP_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class PairSet:
    """All ordered pairs ``(i, j)``, ``i != j``, in lexicographic order."""

    pairs: tuple
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, k):
        return self.pairs[k]


@dataclass(frozen=True, eq=False)
class PointedMetricSpace:
    """A validated finite metric space with a distinguished base point.

    Construct through :func:`new_space`; the constructor itself also
    validates, so an instance never violates the metric axioms.
    """

    labels: tuple
    dist: np.ndarray
    base_index: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        _validate(self.labels, self.dist, self.base_index)
        d = self.dist.copy()
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)

    @property
    def n(self):
        return len(self.labels)

    @property
    def exact(self):
        return arith.is_exact(self.dist)

    @property
    def mode(self):
        return arith.mode_of(self.dist)

    @property
    def base_label(self):
        return self.labels[self.base_index]

    @cached_property
    def nonbase(self):
        """Indices of non-base points; coordinate order of Lip_0 vectors."""
        return tuple(i for i in range(self.n) if i != self.base_index)

    @cached_property
    def slot(self):
        """Map point index -> coordinate position (base point absent)."""
        return {i: k for k, i in enumerate(self.nonbase)}

    @cached_property
    def pairs(self):
        return pair_set(self)

    @cached_property
    def _label_index(self):
        return {lab: i for i, lab in enumerate(self.labels)}

    @property
    def dim(self):
        return self.n - 1

    def index(self, point):
        """Resolve an int index or a label to a point index."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if not 0 <= point < self.n:
                raise IndexError(f"point index {point} out of range for {self.n} points")
            return int(point)
        try:
            return self._label_index[str(point)]
        except KeyError:
            raise KeyError(f"unknown point label {point!r}") from None

    def d(self, x, y):
        return self.dist[self.index(x), self.index(y)]

    def pair_label(self, pair):
        i, j = pair
        return f"({self.labels[i]},{self.labels[j]})"

    def with_mode(self, mode):
        """Same space re-expressed in float or rational arithmetic."""
        exact = mode == arith.RATIONAL
        if exact == self.exact:
            return self
        return PointedMetricSpace(self.labels, arith.as_array(self.dist, exact), self.base_index)

    def __repr__(self):
        return f"PointedMetricSpace(n={self.n}, base={self.base_label!r}, mode={self.mode})"


def new_space(labels, dist, base_index=0, exact=None):
    """Build a validated pointed metric space.

    ``exact=None`` keeps rational input rational and everything else float.
    Raises a :class:`~liplift.errors.MetricError` subclass naming the
    witnessing indices if an axiom fails.
    """
    if exact is None:
        exact = any(isinstance(v, Fraction) for v in np.asarray(dist, dtype=object).ravel())
    return PointedMetricSpace(tuple(labels), arith.as_array(dist, exact), int(base_index))


def _validate(labels, dist, base_index):
    n = len(labels)
    if not isinstance(dist, np.ndarray) or dist.ndim != 2 or dist.shape != (n, n):
        shape = getattr(dist, "shape", None)
        raise InvalidSpace(f"distance matrix shape {shape} does not match {n} labels")
    if n == 0:
        raise InvalidSpace("a pointed space needs at least the base point")
    if len(set(labels)) != n:
        dup = next(lab for lab in labels if labels.count(lab) > 1)
        raise InvalidSpace(f"duplicate label {dup!r}")
    if any(not lab or any(ch.isspace() for ch in lab) for lab in labels):
        raise InvalidSpace("labels must be non-empty and contain no whitespace")
    if not 0 <= base_index < n:
        raise InvalidSpace(f"base index {base_index} out of range for {n} points")

    exact = arith.is_exact(dist)
    if not exact and not np.all(np.isfinite(dist)):
        i, j = np.argwhere(~np.isfinite(dist))[0]
        raise InvalidSpace(f"non-finite distance at ({i},{j})")

    for i in range(n):
        if dist[i, i] != 0:
            raise NonZeroDiagonal(f"d({labels[i]},{labels[i]}) = {dist[i, i]} != 0", (i,))
    for i, j in itertools.combinations(range(n), 2):
        if dist[i, j] != dist[j, i]:
            raise AsymmetricMatrix(
                f"d({labels[i]},{labels[j]}) = {dist[i, j]} but d({labels[j]},{labels[i]}) = {dist[j, i]}",
                (i, j),
            )
    for i, j in itertools.permutations(range(n), 2):
        if dist[i, j] < 0:
            raise NegativeDistance(f"d({labels[i]},{labels[j]}) = {dist[i, j]} < 0", (i, j))
        if dist[i, j] == 0:
            raise ZeroDistanceDistinctPoints(
                f"distinct points {labels[i]} and {labels[j]} at distance 0", (i, j)
            )

    witness = _triangle_witness(dist, exact)
    if witness is not None:
        i, j, k = witness
        raise TriangleViolation(
            f"d({labels[i]},{labels[k]}) = {dist[i, k]} > d({labels[i]},{labels[j]}) + "
            f"d({labels[j]},{labels[k]}) = {dist[i, j] + dist[j, k]}",
            (i, k, j),
        )


def _triangle_witness(dist, exact):
    """First (i, j, k) in lexicographic (i, k, j) order with d[i,k] > d[i,j] + d[j,k]."""
    n = dist.shape[0]
    if exact:
        for i in range(n):
            for k in range(n):
                for j in range(n):
                    if dist[i, k] > dist[i, j] + dist[j, k]:
                        return i, j, k
        return None
    via = dist[:, :, None] + dist[None, :, :]  # via[i, j, k] = d[i,j] + d[j,k]
    slack = TRIANGLE_RTOL * max(float(dist.max()), 1.0)
    bad = dist[:, None, :] > via + slack
    if not bad.any():
        return None
    i, k, j = min((i, k, j) for i, j, k in np.argwhere(bad))
    return int(i), int(j), int(k)


def pair_set(space):
    """Ordered off-diagonal pairs of ``space`` in lexicographic order."""
    pairs = tuple((i, j) for i in range(space.n) for j in range(space.n) if i != j)
    return PairSet(pairs, {p: k for k, p in enumerate(pairs)})


def gen_ultrametric_cube(depth, exact=False):
    """The binary words of length ``depth`` with the first-difference ultrametric.

    ``d(x, y) = 2**-n`` where ``n`` is the first coordinate (numbered from
    :data:`ULTRAMETRIC_FIRST_INDEX`) at which the words differ.  The base
    point is the all-zeros word.
    """
    if not isinstance(depth, (int, np.integer)) or depth < 1:
        raise InvalidSpace(f"depth must be a positive integer, got {depth!r}")
    cap = point_cap()
    if 2**depth > cap:
        raise CapExceeded(f"depth {depth} gives {2**depth} points, cap is {cap}")
    words = list(itertools.product((0, 1), repeat=depth))
    n = len(words)
    dist = np.empty((n, n), dtype=object)
    for a, x in enumerate(words):
        for b, y in enumerate(words):
            first = next((t for t in range(depth) if x[t] != y[t]), None)
            if first is None:
                dist[a, b] = Fraction(0)
            else:
                dist[a, b] = Fraction(1, 2 ** (first + ULTRAMETRIC_FIRST_INDEX))
    labels = ["".join(map(str, w)) for w in words]
    return PointedMetricSpace(tuple(labels), arith.as_array(dist, exact), 0)


def ultrametric_witness(space):
    """First triple violating ``d(x,z) <= max(d(x,y), d(y,z))``, or None."""
    d = space.dist
    n = space.n
    if space.exact:
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if d[x, z] > max(d[x, y], d[y, z]):
                        return x, y, z
        return None
    bad = d[:, None, :] > np.maximum(d[:, :, None], d[None, :, :])
    if not bad.any():
        return None
    x, y, z = np.argwhere(bad)[0]
    return int(x), int(y), int(z)


def metric_axiom_witness(space):
    """Independent re-check of every metric axiom by plain enumeration.

    Returns ``None`` or a tuple ``(axiom, indices)`` for the first failure.
    """
    d = space.dist
    n = space.n
    for i in range(n):
        if d[i, i] != 0:
            return "identity", (i,)
        for j in range(n):
            if d[i, j] != d[j, i]:
                return "symmetry", (i, j)
            if i != j and not d[i, j] > 0:
                return "positivity", (i, j)
    slack = 0 if space.exact else TRIANGLE_RTOL * max(1.0, max(float(v) for v in d.ravel()))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i, k] > d[i, j] + d[j, k] + slack:
                    return "triangle", (i, j, k)
    return None
