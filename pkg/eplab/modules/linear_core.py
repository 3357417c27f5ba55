"""
Linear Core
Basis solutions of v'' + h v = 0 with constant h, and the Pinney
superpositions solving the non-dissipative SEP equation v'' + h v + c v^-3 = 0.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

from eplab.core.errors import ConstraintViolationError, InvalidParameterError
from eplab.core.schemas import Branch, PinneyCoeffs
from eplab.modules.specfun import principal_sqrt

logger = logging.getLogger(__name__)

Evaluator = Callable[[float], float]
ComplexEvaluator = Callable[[float], complex]

CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class LinearBasis:
    """Fundamental pair of the constant-coefficient oscillator"""
    branch: Branch
    lam: float
    u1: Evaluator
    u2: Evaluator
    du1: Evaluator
    du2: Evaluator
    wronskian: float

    @property
    def h(self) -> float:
        """Coefficient h of v'' + h v = 0 for this branch"""
        if self.branch is Branch.POSITIVE:
            return self.lam ** 2
        if self.branch is Branch.NEGATIVE:
            return -self.lam ** 2
        return 0.0


def make_basis(branch: Branch, lam: float = 0.0) -> LinearBasis:
    """
    POSITIVE -> (cos, sin), W = lam; ZERO -> (1, zeta), W = 1;
    NEGATIVE -> (cosh, sinh), W = lam.
    """
    branch = Branch(branch)
    if branch is Branch.ZERO:
        return LinearBasis(
            branch, 0.0,
            u1=lambda z: 1.0, u2=lambda z: z,
            du1=lambda z: 0.0, du2=lambda z: 1.0,
            wronskian=1.0,
        )
    if not lam > 0:
        raise InvalidParameterError(f"lambda must be positive on the {branch.value} branch, got {lam}")
    if branch is Branch.POSITIVE:
        return LinearBasis(
            branch, lam,
            u1=lambda z: math.cos(lam * z), u2=lambda z: math.sin(lam * z),
            du1=lambda z: -lam * math.sin(lam * z), du2=lambda z: lam * math.cos(lam * z),
            wronskian=lam,
        )
    return LinearBasis(
        branch, lam,
        u1=lambda z: math.cosh(lam * z), u2=lambda z: math.sinh(lam * z),
        du1=lambda z: lam * math.sinh(lam * z), du2=lambda z: lam * math.cosh(lam * z),
        wronskian=lam,
    )


def pinney_particular(basis: LinearBasis, c: float) -> ComplexEvaluator:
    """sqrt(u1^2 - c u2^2 / W^2), principal branch"""
    w2 = basis.wronskian ** 2

    def v(zeta: float) -> complex:
        return principal_sqrt(basis.u1(zeta) ** 2 - c * basis.u2(zeta) ** 2 / w2)

    return v


def check_pinney_constraint(basis: LinearBasis, coeffs: PinneyCoeffs) -> float:
    """
    Defect of alpha1 alpha2 - alpha3^2 = -c / W^2.

    Only this sign makes the superposition solve v'' + h v + c v^-3 = 0;
    alpha = (1, -c/W^2, 0) then reduces to the particular solution.
    """
    target = -coeffs.c / basis.wronskian ** 2
    defect = coeffs.alpha1 * coeffs.alpha2 - coeffs.alpha3 ** 2 - target
    if abs(defect) > CONSTRAINT_TOL * max(1.0, abs(target)):
        raise ConstraintViolationError(
            f"alpha1*alpha2 - alpha3^2 = {coeffs.alpha1 * coeffs.alpha2 - coeffs.alpha3 ** 2:.17g}"
            f" but -c/W^2 = {target:.17g}"
        )
    return defect


def pinney_general(basis: LinearBasis, coeffs: PinneyCoeffs) -> ComplexEvaluator:
    """(alpha1 u1^2 + alpha2 u2^2 + 2 alpha3 u1 u2)^(1/2)"""
    check_pinney_constraint(basis, coeffs)

    def v(zeta: float) -> complex:
        u1, u2 = basis.u1(zeta), basis.u2(zeta)
        return principal_sqrt(coeffs.alpha1 * u1 * u1 + coeffs.alpha2 * u2 * u2 + 2.0 * coeffs.alpha3 * u1 * u2)

    return v


def sep_solutions(branch: Branch, lam: float, c: float) -> ComplexEvaluator:
    """
    Particular SEP solutions with v(0) = 1, v'(0) = 0:

        NEGATIVE  sqrt(1 + (1 - c/lam^2) sinh^2(lam zeta))
        ZERO      sqrt(1 - c zeta^2)
        POSITIVE  sqrt(1 - (1 + c/lam^2) sin^2(lam zeta))

    lam is |lambda| on every branch.
    """
    branch = Branch(branch)
    if branch is Branch.ZERO:
        return lambda zeta: principal_sqrt(1.0 - c * zeta * zeta)
    if not lam > 0:
        raise InvalidParameterError(f"lambda must be positive on the {branch.value} branch, got {lam}")
    ratio = c / lam ** 2
    if branch is Branch.POSITIVE:
        return lambda zeta: principal_sqrt(1.0 - (1.0 + ratio) * math.sin(lam * zeta) ** 2)
    return lambda zeta: principal_sqrt(1.0 + (1.0 - ratio) * math.sinh(lam * zeta) ** 2)


def sep_residual(branch: Branch, lam: float, c: float) -> Callable[[float, float, float, float], float]:
    """Residual v'' + h v + c v^-3 in the residual_scan signature"""
    h = {Branch.POSITIVE: lam ** 2, Branch.ZERO: 0.0, Branch.NEGATIVE: -lam ** 2}[Branch(branch)]

    def residual(zeta: float, v: float, dv: float, d2v: float) -> float:
        return d2v + h * v + c / v ** 3

    return residual
