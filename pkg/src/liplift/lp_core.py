"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

One implementation serves both arithmetic backends: float64 arrays with an
absolute tolerance, or object arrays of :class:`~fractions.Fraction` with
exact comparisons.  Every solve is a pure function of its input.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith
from .errors import DimensionMismatch, Infeasible, NoPreimage, NumericalBreakdown, Unbounded

log = logging.getLogger("liplift.lp")

# pivots smaller than this are refused in float mode
PIVOT_FLOOR = 1e-12
MAX_ITERATIONS = 50_000
# set by the CLI --lp-log flag
DEBUG_DEFAULT = False


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``min``/``max`` of ``c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``.

    ``lower`` gives per-variable lower bounds; ``None`` entries mean the
    variable is free.  The default is ``x >= 0``.
    """

    c: np.ndarray
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    A_ub: np.ndarray = None
    b_ub: np.ndarray = None
    lower: tuple = None
    maximize: bool = False

    @property
    def n(self):
        return len(self.c)

    @property
    def exact(self):
        arrays = (self.c, self.A_eq, self.b_eq, self.A_ub, self.b_ub)
        return any(a is not None and arith.is_exact(np.asarray(a)) for a in arrays) or any(
            isinstance(v, Fraction) for v in (self.lower or ())
        )


@dataclass(frozen=True)
class LpSolution:
    status: Status
    value: object = None
    primal: np.ndarray = None
    dual: np.ndarray = None  # multipliers of the equality rows
    dual_ub: np.ndarray = None  # multipliers of the inequality rows (sign: <= 0 for min)
    reduced: np.ndarray = None  # c - A_eq^T y - A_ub^T z, per original variable
    ray: np.ndarray = None  # improving direction when unbounded
    farkas: np.ndarray = None  # phase-one multipliers (eq rows, then ub rows) when infeasible
    iterations: int = 0

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL


def _standardize(lp, exact):
    n = lp.n
    c = arith.as_array(lp.c, exact).reshape(-1)

    def block(A, b, name):
        if A is None and b is None:
            return arith.zeros((0, n), exact), arith.zeros(0, exact)
        if A is None or b is None:
            raise DimensionMismatch(f"{name}: matrix and right-hand side must be given together")
        A = arith.as_array(A, exact)
        b = arith.as_array(b, exact).reshape(-1)
        if A.size == 0 and A.ndim != 2:
            A = A.reshape(len(b), n)
        if A.ndim != 2 or A.shape != (len(b), n):
            raise DimensionMismatch(f"{name}: matrix shape {A.shape} vs {len(b)} rows x {n} variables")
        return A, b

    A, b = block(lp.A_eq, lp.b_eq, "equality constraints")
    G, h = block(lp.A_ub, lp.b_ub, "inequality constraints")
    lower = lp.lower
    if lower is None:
        lower = [0] * n
    if len(lower) != n:
        raise DimensionMismatch(f"{len(lower)} lower bounds for {n} variables")
    return c, A, b, G, h, list(lower)


class _Tableau:
    """Tableau ``T`` with the objective (reduced costs) in the last row and
    the right-hand side in the last column."""

    def __init__(self, T, basis, exact, tol, debug):
        self.T = T
        self.basis = basis
        self.exact = exact
        self.tol = tol
        self.debug = debug
        self.iterations = 0

    def pivot(self, r, e):
        T = self.T
        p = T[r, e]
        if not self.exact and abs(p) < PIVOT_FLOOR:
            raise NumericalBreakdown(f"pivot {p!r} at row {r}, column {e} below {PIVOT_FLOOR}")
        T[r] = T[r] / p
        col = T[:, e].copy()
        col[r] = 0
        nz = np.flatnonzero(col != 0)
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
        if not self.exact:
            T[:, e] = 0.0
            T[r, e] = 1.0
        self.basis[r] = e
        self.iterations += 1
        if self.debug:
            log.debug("pivot %d: row %d, column %d\n%s", self.iterations, r, e, self.T)

    def entering(self, allowed):
        """Bland: lowest-index column with negative reduced cost."""
        row = self.T[-1, :allowed]
        cand = np.flatnonzero(row < -self.tol)
        return int(cand[0]) if cand.size else None

    def leaving(self, e):
        """Minimum ratio test; ties go to the lowest basic variable index."""
        T = self.T
        col = T[:-1, e]
        rows = np.flatnonzero(col > self.tol)
        if rows.size == 0:
            return None
        ratios = [T[i, -1] / T[i, e] for i in rows]
        best = min(ratios)
        ties = [i for i, q in zip(rows, ratios) if q <= best + self.tol]
        return int(min(ties, key=lambda i: self.basis[i]))

    def run(self, allowed):
        """Iterate to optimality; return the unbounded column or None."""
        while True:
            if self.iterations >= MAX_ITERATIONS:
                raise NumericalBreakdown(f"simplex exceeded {MAX_ITERATIONS} iterations")
            e = self.entering(allowed)
            if e is None:
                return None
            r = self.leaving(e)
            if r is None:
                return e
            self.pivot(r, e)


def solve_lp(lp, tol=arith.FLOAT_TOL, debug=None):
    """Solve ``lp`` by two-phase simplex with Bland's rule.

    Returns an :class:`LpSolution`.  Infeasible and unbounded programs are
    reported through ``status``, not raised.  The arithmetic backend is
    rational if any input array holds fractions, float otherwise.
    """
    if debug is None:
        debug = DEBUG_DEFAULT
    exact = lp.exact
    c, A, b, G, h, lower = _standardize(lp, exact)
    tol = arith.tolerance(exact, tol)
    zero = Fraction(0) if exact else 0.0
    sense = -1 if lp.maximize else 1
    n = lp.n
    m_eq, m_ub = len(b), len(h)
    m = m_eq + m_ub

    # column map: each original variable becomes x' = x - l >= 0 or x+ - x-
    cols = []  # (original index, sign)
    shift = arith.zeros(n, exact)
    for j, lo in enumerate(lower):
        if lo is None:
            cols.append((j, 1))
            cols.append((j, -1))
        else:
            shift[j] = arith.to_fraction(lo) if exact else float(lo)
            cols.append((j, 1))
    nx = len(cols)
    M = arith.zeros((m, nx), exact)
    rows = np.vstack([A, G]) if m else arith.zeros((0, n), exact)
    for k, (j, s) in enumerate(cols):
        M[:, k] = rows[:, j] * s
    rhs = np.concatenate([b, h]) - (rows @ shift if m else arith.zeros(0, exact))
    cost = np.array([c[j] * s * sense for j, s in cols], dtype=object if exact else float)

    # slack columns for the inequality rows
    S = arith.zeros((m, m_ub), exact)
    for i in range(m_ub):
        S[m_eq + i, i] = 1
    # rows needing an artificial: all equalities, and inequalities with negative rhs
    sign = np.ones(m, dtype=int)
    needs_art = []
    for i in range(m):
        if i >= m_eq and rhs[i] >= 0:
            continue
        needs_art.append(i)
        if rhs[i] < 0:
            sign[i] = -1
    n_art = len(needs_art)
    Art = arith.zeros((m, n_art), exact)
    for k, i in enumerate(needs_art):
        Art[i, k] = 1

    body = np.hstack([M, S, Art])
    body = body * sign[:, None] if m else body
    # the artificial column must stay +1 after the sign flip
    for k, i in enumerate(needs_art):
        body[i, nx + m_ub + k] = 1
    rhs_s = rhs * sign if m else rhs
    ncols = nx + m_ub + n_art

    T = arith.zeros((m + 1, ncols + 1), exact)
    T[:m, :ncols] = body
    T[:m, -1] = rhs_s
    basis = [0] * m
    unit_col = [0] * m  # column that held e_i initially (gives B^-1)
    for i in range(m):
        if i in needs_art:
            basis[i] = unit_col[i] = nx + m_ub + needs_art.index(i)
        else:
            basis[i] = unit_col[i] = nx + (i - m_eq)
    tab = _Tableau(T, basis, exact, tol, debug)

    # phase one
    if n_art:
        art_rows = needs_art
        T[-1, :] = zero
        for i in art_rows:
            T[-1, :] -= T[i, :]
        for k in range(n_art):
            T[-1, nx + m_ub + k] = zero
        if debug:
            log.debug("phase one start\n%s", T)
        tab.run(nx + m_ub)
        infeas = -T[-1, -1]
        if infeas > tol * max(1, len(art_rows)):
            farkas = np.array([-(T[-1, unit_col[i]] - (1 if i in needs_art else 0)) * sign[i]
                               for i in range(m)], dtype=object if exact else float)
            return LpSolution(Status.INFEASIBLE, farkas=farkas, iterations=tab.iterations)
        # drive zero-level artificials out of the basis
        for i in range(m):
            if basis[i] >= nx + m_ub:
                nz = [j for j in range(nx + m_ub) if abs(T[i, j]) > tol]
                if nz:
                    tab.pivot(i, nz[0])
                # otherwise the row is redundant and stays inert

    # phase two: reduced costs of the real objective
    full_cost = np.concatenate([cost, arith.zeros(m_ub + n_art, exact)])
    T[-1, :ncols] = full_cost
    T[-1, -1] = zero
    for i in range(m):
        cb = full_cost[basis[i]]
        if cb != 0:
            T[-1, :] -= cb * T[i, :]
    if debug:
        log.debug("phase two start\n%s", T)
    e = tab.run(nx + m_ub)

    def to_original(v):
        x = arith.zeros(n, exact)
        for k, (j, s) in enumerate(cols):
            x[j] += s * v[k]
        return x

    if e is not None:
        d = arith.zeros(ncols, exact)
        d[e] = 1
        for i in range(m):
            d[basis[i]] -= T[i, e]
        return LpSolution(Status.UNBOUNDED, ray=to_original(d[:nx]), iterations=tab.iterations)

    v = arith.zeros(ncols, exact)
    for i in range(m):
        v[basis[i]] = T[i, -1]
    x = to_original(v[:nx]) + shift
    value = c @ x if n else zero
    if not exact:
        value = float(value)
    # y_i (normalised rows) = c_unit - reduced_unit, with c_unit = 0
    y_all = np.array([-T[-1, unit_col[i]] * sign[i] * sense for i in range(m)],
                     dtype=object if exact else float)
    y, z = y_all[:m_eq], y_all[m_eq:]
    reduced = c - (A.T @ y if m_eq else arith.zeros(n, exact)) - (G.T @ z if m_ub else arith.zeros(n, exact))
    return LpSolution(
        Status.OPTIMAL,
        value=value,
        primal=x,
        dual=y,
        dual_ub=z,
        reduced=reduced,
        iterations=tab.iterations,
    )


def dual_value(lp, sol):
    """Dual objective ``b.y + h.z + sum_j l_j * reduced_j`` of an optimal solve."""
    exact = lp.exact
    c, A, b, G, h, lower = _standardize(lp, exact)
    total = (b @ sol.dual if len(b) else 0) + (h @ sol.dual_ub if len(h) else 0)
    for j, lo in enumerate(lower):
        if lo is not None:
            total = total + (arith.to_fraction(lo) if exact else float(lo)) * sol.reduced[j]
    return total


def min_l1(A, b, tol=arith.FLOAT_TOL, debug=None):
    """Minimum-l1-norm solution of ``A x = b``.

    Solved as ``min sum(x+ + x-)`` s.t. ``A (x+ - x-) = b``, ``x+, x- >= 0``.
    Returns ``(x, value)``; raises :class:`NoPreimage` when ``b`` is not in
    the range of ``A``.
    """
    exact = arith.is_exact(np.asarray(A)) or arith.is_exact(np.asarray(b))
    A = arith.as_array(A, exact)
    b = arith.as_array(b, exact).reshape(-1)
    if A.ndim != 2 or A.shape[0] != len(b):
        raise DimensionMismatch(f"matrix shape {A.shape} vs right-hand side of length {len(b)}")
    k = A.shape[1]
    if k == 0 and len(b) and arith.max_abs(b) > arith.tolerance(exact, tol):
        raise NoPreimage("no columns to represent a nonzero right-hand side")
    lp = LinearProgram(
        c=arith.as_array(np.ones(2 * k, dtype=int), exact),
        A_eq=np.hstack([A, -A]),
        b_eq=b,
    )
    sol = solve_lp(lp, tol=tol, debug=debug)
    if sol.status is Status.INFEASIBLE:
        raise NoPreimage("right-hand side is not in the range of the matrix")
    if sol.status is not Status.OPTIMAL:
        raise NumericalBreakdown(f"l1 minimisation returned {sol.status.value}")
    x = sol.primal[:k] - sol.primal[k:]
    return x, sol.value


def max_linear(c, G, h, tol=arith.FLOAT_TOL, debug=None):
    """Maximise ``c @ x`` over the polytope ``G x <= h`` (``x`` free).

    Returns ``(argmax, value)`` with ``argmax`` a basic feasible solution.
    """
    exact = any(arith.is_exact(np.asarray(a)) for a in (c, G, h))
    c = arith.as_array(c, exact).reshape(-1)
    lp = LinearProgram(c=c, A_ub=G, b_ub=h, lower=(None,) * len(c), maximize=True)
    sol = solve_lp(lp, tol=tol, debug=debug)
    if sol.status is Status.INFEASIBLE:
        raise Infeasible("polytope is empty")
    if sol.status is Status.UNBOUNDED:
        raise Unbounded("objective is unbounded over the polytope")
    return sol.primal, sol.value
