"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CaloricError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(CaloricError, ValueError):
    """Two objects live in different ambient dimensions."""


class PolynomialSyntaxError(CaloricError, ValueError):
    """Polynomial text could not be parsed."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class NonPositiveSpan(CaloricError, ValueError):
    pass


class InvalidGeneratingSet(CaloricError, ValueError):
    pass


class Inconsistent(CaloricError, ValueError):
    """A linear system has no solution."""


class InternalInconsistency(CaloricError, RuntimeError):
    """A computation contradicted a fact the algorithm relies on."""


class DuplicateTimes(CaloricError, ValueError):
    pass


class TimeOutOfRange(CaloricError, ValueError):
    pass


class NotCaloric(CaloricError, ValueError):
    pass


class GraphError(CaloricError, ValueError):
    """Malformed graph input (loops, multi-edges, asymmetric or bad weights)."""


class SupportTouchesBoundary(CaloricError, ValueError):
    pass


class NotAnEdge(CaloricError, ValueError):
    pass


class BallTruncated(CaloricError, ValueError):
    def __init__(self, radius, message: str | None = None):
        super().__init__(message or f"ball of radius {radius} is not contained in the domain")
        self.radius = radius


class ZeroDenominator(CaloricError, ZeroDivisionError):
    pass


class ModeMismatch(CaloricError, TypeError):
    """Exact and floating-point vertex functions were mixed."""


class SpectralFailure(CaloricError, ArithmeticError):
    pass
