"""
Special Functions
Gauss hypergeometric 2F1 for real arguments z < 1, and the principal-branch
roots shared by every solution family.
"""
import cmath
import logging
import math
import warnings
from typing import Optional, Union

from scipy import special
from scipy.integrate import IntegrationWarning, quad

from eplab.core.config import Config
from eplab.core.errors import (
    DegenerateHypergeometricError,
    DivergenceError,
    DomainError,
    InvalidParameterError,
    NonConvergenceError,
)
from eplab.core.schemas import Hyp2F1Args

logger = logging.getLogger(__name__)

Number = Union[float, complex]

SERIES_TOL = 2.220446049250313e-16
INTEGER_SLACK = 1e-12


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < INTEGER_SLACK


def _near_integer(x: float) -> bool:
    return abs(x - round(x)) < INTEGER_SLACK


# ============================================================================
# Principal roots
# ============================================================================

def principal_root(x: Number, n: int = 2) -> complex:
    """
    Principal n-th root, argument in (-pi, pi].

    A negative real radicand gives |x|^(1/n) e^(i pi/n), so square roots of
    negative reals are purely imaginary with positive imaginary part.
    """
    if isinstance(x, complex):
        if x.imag == 0.0:
            x = x.real
        else:
            return cmath.exp(cmath.log(x) / n)
    if x >= 0:
        return complex(x ** (1.0 / n), 0.0)
    magnitude = (-x) ** (1.0 / n)
    if n == 2:
        return complex(0.0, magnitude)
    return magnitude * cmath.exp(1j * math.pi / n)


def principal_sqrt(x: Number) -> complex:
    return principal_root(x, 2)


def real_value(value: Number, zeta: float = float("nan"), rel: float = 1e-12) -> float:
    """Real part of a value that must be real; raises on a genuine imaginary part."""
    if isinstance(value, complex):
        if abs(value.imag) > rel * max(1.0, abs(value.real)):
            raise DomainError(f"value {value} is not real at zeta={zeta:.17g}", zeta=zeta)
        return value.real
    return float(value)


# ============================================================================
# Gauss hypergeometric function
# ============================================================================

def _series(a: float, b: float, c: float, z: float) -> float:
    """Direct summation; stops after three consecutive negligible terms."""
    term = 1.0
    total = 1.0
    quiet = 0
    for n in range(Config.HYP2F1_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) < SERIES_TOL * abs(total):
            quiet += 1
            if quiet >= Config.HYP2F1_STALL_RUN:
                return total
        else:
            quiet = 0
    raise NonConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {Config.HYP2F1_MAX_TERMS} terms"
    )


def _polynomial(a: float, b: float, c: float, z: float) -> float:
    """Terminating series when a is a non-positive integer."""
    term = 1.0
    total = 1.0
    for n in range(int(round(-a))):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
    return total


def _connection(a: float, b: float, c: float, x: float, y: Optional[float] = None) -> float:
    """
    2F1 on 1/2 < x < 1 through the x -> 1 - x connection formula.

    y = 1 - x may be passed exactly; recomputing it from x near 1 cancels.
    """
    s = c - a - b
    if _near_integer(s):
        raise DegenerateHypergeometricError(
            f"c - a - b = {s:.6g} is an integer; the logarithmic case is not summed here"
        )
    logger.debug(f"2F1 connection formula at x={x:.6g}, c-a-b={s:.6g}")
    y = 1.0 - x if y is None else y
    first = (
        special.gamma(c) * special.gamma(s) * special.rgamma(c - a) * special.rgamma(c - b)
        * _series(a, b, 1.0 - s, y)
    )
    second = (
        special.gamma(c) * special.gamma(-s) * special.rgamma(a) * special.rgamma(b)
        * y ** s * _series(c - a, c - b, 1.0 + s, y)
    )
    return float(first + second)


def _euler_integral(a: float, b: float, c: float, z: float) -> float:
    """
    Euler's integral for z < 1 and c > b > 0 (a and b may be swapped):

        Gamma(c) / (Gamma(b) Gamma(c - b)) * int_0^1 t^(b-1) (1-t)^(c-b-1) (1 - z t)^(-a) dt

    The endpoint powers go to QUADPACK as algebraic weights.
    """
    for p, q in ((a, b), (b, a)):
        if c > q > 0:
            break
    else:
        raise DegenerateHypergeometricError(
            f"2F1({a}, {b}; {c}; {z}): logarithmic case without a convergent Euler integral"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(
                lambda t: (1.0 - z * t) ** (-p), 0.0, 1.0,
                weight="alg", wvar=(q - 1.0, c - q - 1.0),
                epsabs=0.0, epsrel=1e-11, limit=Config.QUAD_LIMIT,
            )
        except IntegrationWarning as exc:
            raise NonConvergenceError(f"Euler integral for 2F1({a}, {b}; {c}; {z}) did not converge: {exc}")
    return float(special.gamma(c) * special.rgamma(q) * special.rgamma(c - q) * value)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """
    Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    Regions:
        |z| <= 1/2          direct series
        -1 <= z < -1/2      Pfaff transformation onto [1/3, 1/2)
        z < -1              Pfaff transformation, then the 1 - w connection with
                            1 - w = 1/(1 - z); Euler's integral when that
                            connection is logarithmic
        1/2 < z < 1         1 - z connection formula

    Raises:
        InvalidParameterError: c is a non-positive integer or an input is not finite
        DivergenceError: z >= 1
        DegenerateHypergeometricError: 1/2 < z < 1 and c - a - b is an integer, or
            z < -1 in the logarithmic case with no convergent Euler integral
        NonConvergenceError: the series exceeds the iteration cap
    """
    if not all(math.isfinite(x) for x in (a, b, c, z)):
        raise InvalidParameterError(f"non-finite 2F1 arguments ({a}, {b}; {c}; {z})")
    if _is_nonpositive_integer(c):
        raise InvalidParameterError(f"2F1 undefined for non-positive integer c = {c}")
    if z >= 1.0:
        raise DivergenceError(f"2F1 argument z = {z} is outside z < 1")

    for p, q in ((a, b), (b, a)):
        if _is_nonpositive_integer(p):
            return _polynomial(float(round(p)), q, c, z)

    if abs(z) <= 0.5:
        return _series(a, b, c, z)

    if z < 0:
        w = z / (z - 1.0)
        prefactor = (1.0 - z) ** (-a)
        if w <= 0.5:
            return prefactor * _series(a, c - b, c, w)
        try:
            return prefactor * _connection(a, c - b, c, w, y=1.0 / (1.0 - z))
        except DegenerateHypergeometricError:
            logger.debug(f"2F1 at z={z:.6g}: b - a is an integer, using Euler's integral")
            return _euler_integral(a, b, c, z)

    return _connection(a, b, c, z)


def hyp2f1_args(args: Hyp2F1Args) -> float:
    return hyp2f1(args.a, args.b, args.c, args.z)
