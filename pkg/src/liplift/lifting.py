"""Operators between Lipschitz spaces and their liftings along the De Leeuw maps.

For finite spaces the pair sets are finite and discrete, so a lifting
``C(M~) -> C(N~)`` is just a matrix whose row ``(p, q)`` is a finitely
supported measure ``g(p, q)`` on ``M~``.  Its operator norm is the largest
row l1 norm, and the lifting commutes with the embeddings exactly when
every row represents the functional ``S*(m_pq)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import arith
from .errors import DimensionMismatch, EqualPoints, SpaceMismatch
from .free_space import FreeVector, free_norm_witness, optimal_representation, pairing
from .lipschitz import LipschitzFunction, apply_de_leeuw, basis_function, lip_norm, resolve_point_map


@dataclass(frozen=True, eq=False)
class LipOperator:
    """``S: Lip_0(M) -> Lip_0(N)`` acting on value vectors, ``(Sf)(p) = A[p] @ f``."""

    domain: object
    codomain: object
    matrix: np.ndarray

    def __post_init__(self):
        if self.domain.exact != self.codomain.exact:
            raise SpaceMismatch("domain and codomain use different arithmetic modes")
        A = arith.as_array(self.matrix, self.domain.exact)
        if A.size == 0:
            A = A.reshape(self.codomain.dim, self.domain.dim)
        if A.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"operator matrix {A.shape}, expected {(self.codomain.dim, self.domain.dim)}"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def exact(self):
        return self.domain.exact

    def __call__(self, f):
        if f.space is not self.domain:
            raise SpaceMismatch("function is not defined on the operator's domain")
        if self.codomain.dim == 0:
            return LipschitzFunction(self.codomain, arith.zeros(0, self.exact))
        if self.domain.dim == 0:
            return LipschitzFunction(self.codomain, arith.zeros(self.codomain.dim, self.exact))
        return LipschitzFunction(self.codomain, self.matrix @ f.values)

    def row(self, p):
        """Row of point ``p`` of N; the base point reads as zero."""
        i = self.codomain.index(p)
        if i == self.codomain.base_index:
            return arith.zeros(self.domain.dim, self.exact)
        return self.matrix[self.codomain.slot[i]]


@dataclass(frozen=True, eq=False)
class LiftingMatrix:
    """Rows follow ``codomain.pairs``, columns follow ``domain.pairs``."""

    domain: object
    codomain: object
    matrix: np.ndarray
    epsilon: object = 0
    row_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        exact = self.domain.exact
        L = arith.as_array(self.matrix, exact)
        shape = (len(self.codomain.pairs), len(self.domain.pairs))
        if L.size == 0:
            L = L.reshape(shape)
        if L.shape != shape:
            raise DimensionMismatch(f"lifting matrix {L.shape}, expected {shape}")
        L.setflags(write=False)
        object.__setattr__(self, "matrix", L)
        if exact:
            norms = np.empty(shape[0], dtype=object)
            norms[:] = [sum((abs(v) for v in row), arith.zeros((), True)[()]) for row in L]
        else:
            norms = np.abs(L).sum(axis=1)
        norms.setflags(write=False)
        object.__setattr__(self, "row_norms", norms)

    def apply(self, F):
        """``(L F)(p, q) = integral of F against g(p, q)``."""
        F = np.asarray(F)
        if F.shape != (len(self.domain.pairs),):
            raise DimensionMismatch(f"function on M~ has shape {F.shape}")
        if not len(self.codomain.pairs):
            return arith.zeros(0, self.domain.exact)
        if not len(self.domain.pairs):
            return arith.zeros(len(self.codomain.pairs), self.domain.exact)
        return self.matrix @ F

    def measure(self, p, q):
        """The row ``g(p, q)`` as ``{(x, y): weight}`` over its support."""
        cod = self.codomain
        r = cod.pairs.index[(cod.index(p), cod.index(q))]
        return {pair: w for pair, w in zip(self.domain.pairs, self.matrix[r]) if w != 0}

    def rank(self):
        """Numerical (float) or exact (rational) rank; a diagnostic only."""
        if self.matrix.size == 0:
            return 0
        if self.domain.exact:
            return _exact_rank(self.matrix)
        return int(np.linalg.matrix_rank(self.matrix))


def _exact_rank(M):
    M = [list(r) for r in M]
    rank, rows, cols = 0, len(M), len(M[0])
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rows):
            if r != rank and M[r][c] != 0:
                k = M[r][c] / M[rank][c]
                M[r] = [a - k * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def adjoint_molecule(S, p, q):
    """``S*(m_pq)``: the functional ``f -> ((Sf)(p) - (Sf)(q)) / d_N(p, q)`` on Lip_0(M)."""
    N = S.codomain
    i, j = N.index(p), N.index(q)
    if i == j:
        raise EqualPoints(f"adjoint molecule needs distinct points, got {N.labels[i]} twice")
    return FreeVector(S.domain, (S.row(i) - S.row(j)) / N.dist[i, j])


def operator_norm_witness(S, tol=arith.FLOAT_TOL):
    """``(norm, pair, f)``: ``f`` in the unit ball of Lip_0(M) with ``lip_norm(Sf) = norm``.

    The norm is the largest free norm of an adjoint molecule; ``pair`` is
    the first pair of N~ attaining it.  A one-point codomain gives norm 0.
    """
    exact = S.exact
    best, best_pair, best_f = arith.zeros((), exact)[()], None, LipschitzFunction(S.domain, arith.zeros(S.domain.dim, exact))
    for pair in S.codomain.pairs:
        value, f = free_norm_witness(adjoint_molecule(S, *pair), tol)
        if best_pair is None or value > best:
            best, best_pair, best_f = value, pair, f
    return best, best_pair, best_f


def operator_norm(S, tol=arith.FLOAT_TOL):
    """``||S|| = max over (p, q) of free_norm(S*(m_pq))``."""
    return operator_norm_witness(S, tol)[0]


def build_lifting(S, epsilon=0, tol=arith.FLOAT_TOL, workers=None):
    """Lifting whose row ``(p, q)`` is a cheapest molecular representation of ``S*(m_pq)``.

    Each row costs exactly ``free_norm(S*(m_pq))``, so the lifting norm
    equals ``||S||``; ``epsilon`` is the slack allowed on top of that and
    is recorded on the result.  ``workers > 1`` solves rows in a thread pool;
    row order is unaffected.
    """
    exact = S.exact
    eps = arith.to_fraction(epsilon)
    if eps < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    eps = eps if exact else float(eps)
    pairs = list(S.codomain.pairs)
    ncols = len(S.domain.pairs)

    def solve(pair):
        return optimal_representation(adjoint_molecule(S, *pair), tol).coefficients

    if workers and workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve, pairs))
    else:
        rows = [solve(pair) for pair in pairs]
    L = arith.zeros((len(pairs), ncols), exact)
    for r, row in enumerate(rows):
        L[r, :] = row
    return LiftingMatrix(S.domain, S.codomain, L, eps)


def lifting_norm(L):
    """Largest row l1 norm, i.e. the sup of the total variations of ``g(p, q)``."""
    if not len(L.row_norms):
        return arith.zeros((), L.domain.exact)[()]
    return max(L.row_norms) if L.domain.exact else float(L.row_norms.max())


def commutation_residuals(S, L):
    """Matrix of ``L(Phi_M e_z) - Phi_N(S e_z)``: rows ``N~`` pairs, columns basis points of M."""
    if L.domain is not S.domain or L.codomain is not S.codomain:
        raise DimensionMismatch("lifting and operator act between different spaces")
    exact = S.exact
    out = arith.zeros((len(S.codomain.pairs), S.domain.dim), exact)
    for k, z in enumerate(S.domain.nonbase):
        e = basis_function(S.domain, z)
        out[:, k] = L.apply(apply_de_leeuw(e)) - apply_de_leeuw(S(e))
    return out


def verify_commutation(S, L):
    """Largest entry of ``|L Phi_M e_z - Phi_N S e_z|`` over basis functions and pairs.

    The identity is linear in ``f``, so vanishing on the basis is
    complete; see :func:`unit_ball_residual_bound` for the induced bound
    over the unit ball.
    """
    return arith.max_abs(commutation_residuals(S, L))


def unit_ball_residual_bound(S, L):
    """Bound on the commutation residual over ``lip_norm(f) <= 1``.

    Uses ``|f(z)| <= d(z, 0)`` for such ``f``.
    """
    R = commutation_residuals(S, L)
    M = S.domain
    if R.size == 0:
        return arith.zeros((), S.exact)[()]
    radii = np.array([M.dist[z, M.base_index] for z in M.nonbase], dtype=R.dtype)
    weighted = np.abs(R) @ radii if not S.exact else np.array([sum(abs(v) * r for v, r in zip(row, radii)) for row in R])
    return max(weighted) if S.exact else float(weighted.max())


def composition_operator(gamma, r, domain, codomain):
    """``S(f) = r * (f o gamma)`` for a base-preserving ``gamma: N -> M``."""
    g = resolve_point_map(gamma, codomain, domain)
    exact = domain.exact
    A = arith.zeros((codomain.dim, domain.dim), exact)
    rr = arith.to_fraction(r) if exact else float(r)
    for p in codomain.nonbase:
        z = g[p]
        if z != domain.base_index:
            A[codomain.slot[p], domain.slot[z]] = rr
    return LipOperator(domain, codomain, A)


def composition_lifting(gamma, r, domain, codomain):
    """Explicit lifting of ``f -> r * (f o gamma)``.

    Row ``(x, y)`` carries ``r * d_M(gamma x, gamma y) / d_N(x, y)`` at column
    ``(gamma x, gamma y)``; rows with ``gamma x == gamma y`` are zero.
    """
    g = resolve_point_map(gamma, codomain, domain)
    exact = domain.exact
    rr = arith.to_fraction(r) if exact else float(r)
    L = arith.zeros((len(codomain.pairs), len(domain.pairs)), exact)
    for row, (x, y) in enumerate(codomain.pairs):
        gx, gy = g[x], g[y]
        if gx != gy:
            L[row, domain.pairs.index[(gx, gy)]] = rr * domain.dist[gx, gy] / codomain.dist[x, y]
    return LiftingMatrix(domain, codomain, L)


def continuity_bound(N, opnorm, xy, pq):
    """Right-hand side of the continuity estimate for ``h(p,q) = S*(m_pq)``.

    ``||S||/d(x,y) * (d(x,p) + d(y,q))
    + ||S||/(d(x,y) d(p,q)) * (d(p,0) + d(q,0)) * |d(p,q) - d(x,y)|``
    """
    x, y = xy
    p, q = pq
    d = N.dist
    o = N.base_index
    dxy, dpq = d[x, y], d[p, q]
    return opnorm / dxy * (d[x, p] + d[y, q]) + opnorm / (dxy * dpq) * (d[p, o] + d[q, o]) * abs(dpq - dxy)


def continuity_modulus_check(S, trials, seed, opnorm=None, tol=arith.FLOAT_TOL):
    """Largest ``|<S*m_xy - S*m_pq, f>| - bound`` over random pairs and unit-ball ``f``.

    Nonpositive values mean the estimate held on every trial.  Returns 0
    when N has fewer than two points (no pairs to compare).
    """
    from .fixtures import random_unit_ball_function

    N = S.codomain
    exact = S.exact
    if len(N.pairs) == 0:
        return arith.zeros((), exact)[()]
    if opnorm is None:
        opnorm = operator_norm(S, tol)
    rng = np.random.default_rng(seed)
    worst = None
    pairs = N.pairs.pairs
    for _ in range(trials):
        xy = pairs[rng.integers(len(pairs))]
        pq = pairs[rng.integers(len(pairs))]
        f = random_unit_ball_function(S.domain, rng)
        lhs = abs(pairing(adjoint_molecule(S, *xy) - adjoint_molecule(S, *pq), f))
        violation = lhs - continuity_bound(N, opnorm, xy, pq)
        if worst is None or violation > worst:
            worst = violation
    return worst if exact else float(worst)


def sampled_operator_norm(S, samples, rng):
    """Largest ``lip_norm(Sf)`` over random unit-ball samples (a lower bound on ``||S||``)."""
    from .fixtures import random_unit_ball_function

    best = arith.zeros((), S.exact)[()]
    for _ in range(samples):
        best = max(best, lip_norm(S(random_unit_ball_function(S.domain, rng))))
    return best
