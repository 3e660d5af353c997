"""Float / exact-rational arithmetic backends.

Everything numeric in liplift is a numpy array.  Float mode uses
``float64``; rational mode uses ``object`` arrays holding
:class:`fractions.Fraction`, so the same vectorised code serves both.
"""

from fractions import Fraction

import numpy as np

FLOAT = "float"
RATIONAL = "rational"
MODES = (FLOAT, RATIONAL)

# default feasibility / optimality tolerance of the float backend
FLOAT_TOL = 1e-9


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise ValueError(f"non-finite value {x!r} in rational mode")
        return Fraction(float(x))
    return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)


def is_exact(a):
    return isinstance(a, np.ndarray) and a.dtype == object


def mode_of(a):
    return RATIONAL if is_exact(a) else FLOAT


def as_array(values, exact=False):
    """Convert ``values`` to an array in the requested mode."""
    if exact:
        src = np.asarray(values, dtype=object)
        out = np.empty(src.shape, dtype=object)
        for idx, v in np.ndenumerate(src):
            out[idx] = to_fraction(v)
        return out
    if isinstance(values, np.ndarray) and values.dtype == object:
        return np.vectorize(float, otypes=[float])(values) if values.size else values.astype(float)
    return np.asarray(values, dtype=float)


def zeros(shape, exact=False):
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def one(exact=False):
    return Fraction(1) if exact else 1.0


def tolerance(exact, tol=FLOAT_TOL):
    return 0 if exact else tol


def max_abs(a):
    """Largest absolute entry, 0 for empty input (same dtype semantics)."""
    a = np.asarray(a)
    if a.size == 0:
        return Fraction(0) if a.dtype == object else 0.0
    return max(abs(v) for v in a.ravel()) if a.dtype == object else float(np.max(np.abs(a)))


def to_float(x):
    return float(x)


def format_number(x):
    """Render a scalar losslessly: ``p/q`` for fractions, ``repr`` for floats."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))
