"""Randomised property battery behind the ``suite`` command.

Each property runs ``trials`` seeded instances, cycling through the
requested space sizes, and records its worst observed value.  The battery
stops at the first failing property and keeps a serialisable witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import arith
from .fixtures import (
    random_bijection,
    random_free_vector,
    random_function,
    random_nonzero_scalar,
    random_operator,
    random_space,
    random_unit_ball_function,
)
from .free_space import dirac, duality_gap, free_norm, molecule
from .lifting import (
    LiftingMatrix,
    build_lifting,
    composition_lifting,
    composition_operator,
    continuity_modulus_check,
    lifting_norm,
    operator_norm,
    operator_norm_witness,
    verify_commutation,
)
from .lipschitz import apply_de_leeuw, lip_norm
from .metric_space import metric_axiom_witness

# attainment slack for the operator-norm witness
WITNESS_TOL = 1e-6


@dataclass
class PropertyResult:
    name: str
    passed: bool
    instances: int
    worst: object = 0
    witness: dict = field(default_factory=dict)


@dataclass
class SuiteConfig:
    seed: int = 42
    sizes: tuple = (1, 2, 3, 4, 5)
    trials: int = 200
    exact: bool = False
    tol: float = 1e-8  # commutation residual, lifting vs operator norm
    lp_tol: float = arith.FLOAT_TOL  # duality gaps, sampling slack, continuity estimate
    inject_fault: bool = False


def _fmt(v):
    if isinstance(v, np.ndarray):
        return [_fmt(x) for x in v]
    if isinstance(v, (tuple, list)):
        return [_fmt(x) for x in v]
    if isinstance(v, (int, float, np.integer, np.floating)) or hasattr(v, "denominator"):
        return arith.format_number(v)
    return v


def _space_witness(space):
    return {"labels": list(space.labels), "base": space.base_index, "dist": _fmt(space.dist)}


class _Battery:
    def __init__(self, cfg):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.sizes = itertools.cycle(cfg.sizes)
        self.tol = arith.tolerance(cfg.exact, cfg.tol)
        self.lp_tol = arith.tolerance(cfg.exact, cfg.lp_tol)

    def space(self):
        return random_space(int(next(self.sizes)), self.rng, self.cfg.exact)

    def run(self, name, check):
        """``check`` returns ``(value, ok, witness)`` per instance."""
        worst = None
        for k in range(self.cfg.trials):
            value, ok, witness = check()
            if worst is None or value > worst:
                worst = value
            if not ok:
                witness = {"instance": k, **witness}
                return PropertyResult(name, False, k + 1, value, witness)
        return PropertyResult(name, True, self.cfg.trials, worst if worst is not None else 0)

    # -- properties ------------------------------------------------------

    def metric_axioms(self):
        M = self.space()
        w = metric_axiom_witness(M)
        return (0 if w is None else 1), w is None, {"space": _space_witness(M), "triple": w}

    def isometry(self):
        M = self.space()
        f = random_function(M, self.rng)
        gap = abs(arith.max_abs(apply_de_leeuw(f)) - lip_norm(f))
        return gap, gap == 0, {"space": _space_witness(M), "f": _fmt(f.values)}

    def duality(self):
        M = self.space()
        mu = random_free_vector(M, self.rng)
        gap = duality_gap(mu, self.cfg.lp_tol)
        return gap, gap <= self.lp_tol, {"space": _space_witness(M), "mu": _fmt(mu.coeffs)}

    def molecules(self):
        M = self.space()
        worst = 0
        for x, y in M.pairs:
            worst = max(worst, abs(free_norm(molecule(M, x, y), self.cfg.lp_tol) - 1))
        return worst, worst <= self.lp_tol, {"space": _space_witness(M)}

    def diracs(self):
        M = self.space()
        worst = 0
        for z in M.nonbase:
            worst = max(worst, abs(free_norm(dirac(M, z), self.cfg.lp_tol) - M.dist[z, M.base_index]))
        return worst, worst <= self.lp_tol, {"space": _space_witness(M)}

    def _lifted(self):
        M, N = self.space(), self.space()
        S = random_operator(M, N, self.rng)
        L = build_lifting(S, 0, self.cfg.lp_tol)
        if self.cfg.inject_fault and L.matrix.size:
            bad = L.matrix.copy()
            bad.setflags(write=True)
            bad[0, 0] = bad[0, 0] + 1
            L = LiftingMatrix(L.domain, L.codomain, bad)
        return M, N, S, L

    def commutation(self):
        M, N, S, L = self._lifted()
        res = verify_commutation(S, L)
        return res, res <= self.tol, {"domain": _space_witness(M), "codomain": _space_witness(N),
                                      "operator": _fmt(S.matrix)}

    def lifting_bound(self):
        M, N, S, L = self._lifted()
        gap = abs(lifting_norm(L) - operator_norm(S, self.cfg.lp_tol))
        return gap, gap <= self.tol, {"domain": _space_witness(M), "codomain": _space_witness(N),
                                      "operator": _fmt(S.matrix)}

    def norm_sampling(self):
        M, N = self.space(), self.space()
        S = random_operator(M, N, self.rng)
        norm, pair, f = operator_norm_witness(S, self.cfg.lp_tol)
        excess = arith.zeros((), self.cfg.exact)[()]
        for _ in range(5):
            g = random_unit_ball_function(M, self.rng)
            excess = max(excess, lip_norm(S(g)) - norm)
        shortfall = norm - lip_norm(S(f))
        value = max(excess, shortfall)
        ok = excess <= self.lp_tol and shortfall <= WITNESS_TOL and lip_norm(f) <= 1 + self.lp_tol
        return value, ok, {"domain": _space_witness(M), "codomain": _space_witness(N),
                           "operator": _fmt(S.matrix)}

    def continuity(self):
        M, N = self.space(), self.space()
        S = random_operator(M, N, self.rng)
        seed = int(self.rng.integers(2**31))
        v = continuity_modulus_check(S, 5, seed, tol=self.cfg.lp_tol)
        return v, v <= self.lp_tol, {"domain": _space_witness(M), "codomain": _space_witness(N),
                                     "operator": _fmt(S.matrix), "seed": seed}

    def composition(self):
        n = int(next(self.sizes))
        M = random_space(n, self.rng, self.cfg.exact)
        N = random_space(n, self.rng, self.cfg.exact)
        gamma = random_bijection(n, self.rng)
        r = random_nonzero_scalar(self.rng, self.cfg.exact)
        S = composition_operator(gamma, r, M, N)
        L = composition_lifting(gamma, r, M, N)
        res = verify_commutation(S, L)
        closed = max((abs(r) * M.dist[gamma[x], gamma[y]] / N.dist[x, y] for x, y in N.pairs), default=0)
        norm_gap = abs(lifting_norm(L) - closed)
        built = lifting_norm(build_lifting(S, 0, self.cfg.lp_tol))
        value = max(res, norm_gap, built - closed)
        ok = res <= self.tol and norm_gap <= self.lp_tol and built <= closed + self.lp_tol
        return value, ok, {"domain": _space_witness(M), "codomain": _space_witness(N),
                           "gamma": gamma, "r": _fmt(r)}


PROPERTIES = (
    ("metric_axioms", "metric_axioms"),
    ("apply_de_leeuw_isometry", "isometry"),
    ("duality_gap", "duality"),
    ("free_norm_molecules", "molecules"),
    ("free_norm_dirac", "diracs"),
    ("verify_commutation", "commutation"),
    ("lifting_norm", "lifting_bound"),
    ("operator_norm", "norm_sampling"),
    ("continuity_modulus_check", "continuity"),
    ("composition_lifting", "composition"),
)


def run_suite(cfg):
    """Run every property in order; stop after the first failure."""
    battery = _Battery(cfg)
    results = []
    for name, method in PROPERTIES:
        result = battery.run(name, getattr(battery, method))
        results.append(result)
        if not result.passed:
            break
    return results
