"""Exception hierarchy shared by every liplift module."""


class LipliftError(Exception):
    """Base class for all errors raised by liplift."""


# -- metric spaces ---------------------------------------------------------


class MetricError(LipliftError, ValueError):
    """A distance matrix violates a metric axiom.

    ``witness`` holds the offending point indices.
    """

    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class AsymmetricMatrix(MetricError):
    pass


class NegativeDistance(MetricError):
    pass


class ZeroDistanceDistinctPoints(MetricError):
    pass


class NonZeroDiagonal(MetricError):
    pass


class TriangleViolation(MetricError):
    pass


class InvalidSpace(LipliftError, ValueError):
    """Shape, label or base-point problems that are not metric axioms."""


class CapExceeded(LipliftError, ValueError):
    pass


# -- linear programming ----------------------------------------------------


class LpError(LipliftError):
    pass


class DimensionMismatch(LpError, ValueError):
    pass


class NumericalBreakdown(LpError, ArithmeticError):
    pass


class Infeasible(LpError):
    pass


class Unbounded(LpError):
    pass


class NoPreimage(Infeasible):
    """``A x = b`` has no solution."""


# -- functions, functionals, operators --------------------------------------


class SpaceMismatch(LipliftError, ValueError):
    pass


class EqualPoints(LipliftError, ValueError):
    pass


class BaseNotPreserved(LipliftError, ValueError):
    pass


class ParseError(LipliftError, ValueError):
    """Malformed input file; carries a 1-based line/column diagnostic."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)
