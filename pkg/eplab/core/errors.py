"""
Exception hierarchy for EP Lab.

Every failure a solver or oracle can report derives from EPLabError so the
CLI can map it to exit code 1.
"""
from typing import Optional


class EPLabError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(EPLabError, ValueError):
    """A parameter bundle or argument is outside the family's definition."""


class DomainError(EPLabError):
    """A real-valued quantity was requested outside its domain of validity."""

    def __init__(self, message: str, zeta: Optional[float] = None):
        super().__init__(message)
        self.zeta = zeta


class SingularityError(DomainError):
    """Evaluation at a pole (v = 0, u = 0)."""


class IntegrandError(DomainError):
    """Quadrature integrand vanished or became non-finite."""


class DivergenceError(EPLabError):
    """Series or integral diverges for the requested argument."""


class NonConvergenceError(EPLabError):
    """Iterative procedure did not reach its tolerance within its cap."""


class DegenerateHypergeometricError(EPLabError):
    """The 1 - z connection formula hits the logarithmic case c - a - b in Z."""


class ConstraintViolationError(EPLabError):
    """Coefficients violate an algebraic constraint of the solution family."""


class IntegrationHalted(EPLabError):
    """An integration stopped before the end of its span."""

    def __init__(self, reason: str, reached_zeta: float, message: str = ""):
        super().__init__(message or f"integration halted ({reason}) at zeta={reached_zeta:.17g}")
        self.reason = reason
        self.reached_zeta = reached_zeta
