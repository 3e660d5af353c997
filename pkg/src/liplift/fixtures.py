"""Seeded random fixtures: spaces, functions, functionals and operators.

All generators take a ``numpy.random.Generator`` and respect the
arithmetic mode of the space they are given.
"""

from __future__ import annotations

import math
import string
from fractions import Fraction

import numpy as np

from . import arith
from .free_space import FreeVector
from .lifting import LipOperator
from .lipschitz import LipschitzFunction, lip_norm
from .metric_space import PointedMetricSpace

# rational fixtures draw numerators from [-DENOM, DENOM] over DENOM
DENOM = 8


def default_labels(n):
    names = ["0"] + list(string.ascii_lowercase)
    if n <= len(names):
        return names[:n]
    return ["0"] + [f"p{i}" for i in range(1, n)]


def _uniform(rng, lo, hi, size, exact):
    if not exact:
        return rng.uniform(lo, hi, size=size)
    nums = rng.integers(math.ceil(lo * DENOM), math.floor(hi * DENOM) + 1, size=size)
    out = np.empty(np.shape(nums), dtype=object)
    for idx, v in np.ndenumerate(nums):
        out[idx] = Fraction(int(v), DENOM)
    return out


def shortest_path_metric(weights):
    """Floyd-Warshall closure of a symmetric positive weight matrix."""
    d = weights.copy()
    n = d.shape[0]
    for i in range(n):
        d[i, i] = 0 * d[i, i]
    for k in range(n):
        via = d[:, k][:, None] + d[k, :][None, :]
        if d.dtype == object:
            d = np.where(via < d, via, d)
        else:
            d = np.minimum(d, via)
    return d


def random_space(n, rng, exact=False, low=0.5, high=3.0):
    """A generic ``n``-point metric: shortest paths over random edge weights."""
    w = _uniform(rng, low, high, (n, n), exact)
    w = np.triu(w, 1)
    w = w + w.T
    return PointedMetricSpace(tuple(default_labels(n)), shortest_path_metric(w), 0)


def scaled_space(space, factor):
    """Same labels and base, every distance multiplied by ``factor``."""
    f = arith.to_fraction(factor) if space.exact else float(factor)
    return PointedMetricSpace(space.labels, space.dist * f, space.base_index)


def random_function(space, rng, low=-1.0, high=1.0):
    return LipschitzFunction(space, _uniform(rng, low, high, space.dim, space.exact))


def random_unit_ball_function(space, rng):
    """A random ``f`` with ``lip_norm(f) <= 1``.

    Mixes normalised random functions with the extreme points
    ``z -> +-(d(z, w) - d(0, w))`` of the unit ball.
    """
    if space.dim == 0:
        return LipschitzFunction(space, arith.zeros(0, space.exact))
    kind = rng.integers(3)
    if kind == 0:
        w = int(rng.integers(space.n))
        s = 1 if rng.integers(2) else -1
        d = space.dist
        vals = [s * (d[z, w] - d[space.base_index, w]) for z in space.nonbase]
        return LipschitzFunction(space, arith.as_array(vals, space.exact))
    f = random_function(space, rng)
    norm = lip_norm(f)
    if norm == 0:
        return f
    scale = norm if kind == 1 else norm / _uniform(rng, 0.1, 1.0, (), space.exact)[()]
    return LipschitzFunction(space, f.values / scale)


def random_free_vector(space, rng, low=-1.0, high=1.0):
    return FreeVector(space, _uniform(rng, low, high, space.dim, space.exact))


def random_operator(domain, codomain, rng, low=-1.0, high=1.0):
    """Dense operator with entries uniform in ``[low, high]``."""
    A = _uniform(rng, low, high, (codomain.dim, domain.dim), domain.exact)
    return LipOperator(domain, codomain, A)


def random_bijection(n, rng, base_index=0):
    """Random permutation of ``range(n)`` fixing ``base_index``."""
    rest = [i for i in range(n) if i != base_index]
    perm = list(rng.permutation(rest))
    out = [0] * n
    out[base_index] = base_index
    for i, j in zip(rest, perm):
        out[i] = int(j)
    return out


def random_nonzero_scalar(rng, exact, bound=2.0):
    while True:
        r = _uniform(rng, -bound, bound, (), exact)[()]
        if r != 0:
            return r
