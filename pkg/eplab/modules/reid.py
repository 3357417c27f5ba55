"""
Reid Nonlinearities
Solutions of v'' + h v = q v^(1-2m), their hypergeometric Milne phases, and
the dissipative general solutions u = theta(Theta) v_m.
"""
import logging
import math
from typing import Callable, Dict, Optional, Tuple

from eplab.core.errors import (
    DegenerateHypergeometricError,
    DivergenceError,
    DomainError,
    SingularityError,
)
from eplab.core.schemas import Branch, ReidParams, Sign
from eplab.modules.invariant_theorem import theta_of_phase
from eplab.modules.linear_core import LinearBasis
from eplab.modules.oracle import adaptive_quadrature
from eplab.modules.specfun import hyp2f1, principal_root, real_value

logger = logging.getLogger(__name__)

# Theta_+ as an integral of v^-2 runs opposite to the phase the reference u_+ uses
PHASE_ORIENTATION: Dict[Branch, float] = {
    Branch.NEGATIVE: 1.0,
    Branch.ZERO: 1.0,
    Branch.POSITIVE: -1.0,
}

# (I_bc, b, c) implied by the reference u solutions at lambda = 1/2, a = b = c~ = c1 = 1
REFERENCE_CONSTANTS: Dict[Branch, Tuple[float, float, float]] = {
    Branch.NEGATIVE: (1.0, 2.0, 0.5),
    Branch.ZERO: (1.0, 1.0, 0.0),
    Branch.POSITIVE: (1.0, 2.0, -0.5),
}


def q_m(u1: float, u2: float, rp: ReidParams) -> float:
    """c~ (u1 u2)^(m-2)"""
    return rp.c_tilde * (u1 * u2) ** (rp.m - 2)


def reid_general(basis: LinearBasis, rp: ReidParams) -> Callable[[float], complex]:
    """(u1^m + c~ u2^m / ((m-1) W^2))^(1/m), principal m-th root"""
    scale = rp.c_tilde / ((rp.m - 1) * basis.wronskian ** 2)

    def v(zeta: float) -> complex:
        return principal_root(basis.u1(zeta) ** rp.m + scale * basis.u2(zeta) ** rp.m, rp.m)

    return v


def reid_residual(basis: LinearBasis, rp: ReidParams) -> Callable[[float, float, float, float], float]:
    """v'' + h v - q_m(zeta) v^(1-2m) along the basis"""
    def residual(zeta: float, v: float, dv: float, d2v: float) -> float:
        q = q_m(basis.u1(zeta), basis.u2(zeta), rp)
        return d2v + basis.h * v - q * v ** (1 - 2 * rp.m)
    return residual


# ============================================================================
# Explicit families
# ============================================================================

def _power_sum(rp: ReidParams, zeta: float) -> float:
    """v_m^m"""
    x = rp.m * rp.lam * zeta
    if rp.branch is Branch.NEGATIVE:
        try:
            return rp.A * math.exp(x) + rp.B * math.exp(-x)
        except OverflowError:
            raise DomainError(f"v_m overflows at zeta={zeta:.17g}", zeta=zeta)
    if rp.branch is Branch.ZERO:
        return 1.0 + rp.B0 * zeta ** rp.m
    return rp.A * math.cos(x) + rp.B * math.sin(x)


def v_m(rp: ReidParams) -> Callable[[float], complex]:
    return lambda zeta: principal_root(_power_sum(rp, zeta), rp.m)


def reid_strength(rp: ReidParams, zeta: float) -> float:
    """
    q for which v_m solves v'' + h v = q v^(1-2m):

        NEGATIVE  4 (m-1) lambda^2 A B      (equals c~)
        ZERO      (m-1) B0 zeta^(m-2)       (equals c~ zeta^(m-2))
        POSITIVE  -(m-1) lambda^2 (A^2 + B^2)
    """
    m, lam2 = rp.m, rp.lam ** 2
    if rp.branch is Branch.NEGATIVE:
        return 4.0 * (m - 1) * lam2 * rp.A * rp.B
    if rp.branch is Branch.ZERO:
        return (m - 1) * rp.B0 * zeta ** (m - 2)
    return -(m - 1) * lam2 * (rp.A ** 2 + rp.B ** 2)


def branch_h(rp: ReidParams) -> float:
    return {Branch.NEGATIVE: -rp.lam ** 2, Branch.ZERO: 0.0, Branch.POSITIVE: rp.lam ** 2}[rp.branch]


def v_m_residual(rp: ReidParams) -> Callable[[float, float, float, float], float]:
    h = branch_h(rp)

    def residual(zeta: float, v: float, dv: float, d2v: float) -> float:
        return d2v + h * v - reid_strength(rp, zeta) * v ** (1 - 2 * rp.m)

    return residual


# ============================================================================
# Phases
# ============================================================================

def theta_m_quadrature(rp: ReidParams, zeta: float, start: float = 0.0, tol: Optional[float] = None) -> float:
    """integral from start to zeta of v_m^-2"""
    v = v_m(rp)

    def integrand(z: float) -> float:
        value = real_value(v(z), z)
        if value == 0:
            raise SingularityError(f"v_m vanishes at zeta={z:.17g}", zeta=z)
        return value ** -2

    return adaptive_quadrature(integrand, start, zeta, tol)


def _arc_integral(y: float, m: int) -> float:
    """
    y 2F1(1/2, 1/2 + 1/m; 3/2; y^2) = integral from 0 to y of (1 - t^2)^(-1/2-1/m).
    """
    if y * y >= 1.0:
        raise DomainError(f"cos^2 phi = {y * y:.17g} reaches 1; v_+ vanishes there")
    try:
        return y * hyp2f1(0.5, 0.5 + 1.0 / m, 1.5, y * y)
    except DegenerateHypergeometricError:
        logger.info(f"Theta_+ for m={m}: logarithmic 2F1 case, using quadrature")
        return adaptive_quadrature(lambda t: (1.0 - t * t) ** (-0.5 - 1.0 / m), 0.0, y)


def theta_m(rp: ReidParams, zeta: float) -> float:
    """
    Closed-form Milne phase of v_m through 2F1:

        NEGATIVE  (A X + B) / (2 lambda B P^(2/m)) 2F1(1, (m-1)/m; (m+1)/m; -A X / B),
                  X = exp(2 m lambda zeta), phase origin at zeta -> -infinity
        ZERO      zeta 2F1(1/m, 2/m; (m+1)/m; -B0 zeta^m), origin 0
        POSITIVE  -R^(-2/m) cos(phi) 2F1(1/2, 1/2 + 1/m; 3/2; cos^2 phi) / (m lambda),
                  phi = m lambda zeta + atan2(A, B), R = sqrt(A^2 + B^2)

    Each is an antiderivative of v_m^-2 on real windows. Sign patterns without
    a closed form fall back to quadrature from zeta = 0.
    """
    m, lam = rp.m, rp.lam
    if rp.branch is Branch.ZERO:
        return zeta * hyp2f1(1.0 / m, 2.0 / m, (m + 1.0) / m, -rp.B0 * zeta ** m)

    if rp.branch is Branch.NEGATIVE:
        A, B = rp.A, rp.B
        if A <= 0 or B <= 0:
            logger.info(f"Theta_- closed form needs A, B > 0 (A={A:g}, B={B:g}); using quadrature")
            return theta_m_quadrature(rp, zeta)
        try:
            x = math.exp(2.0 * m * lam * zeta)
            p = A * math.exp(m * lam * zeta) + B * math.exp(-m * lam * zeta)
        except OverflowError:
            raise DomainError(f"Theta_- overflows at zeta={zeta:.17g}", zeta=zeta)
        prefactor = (A * x + B) / (2.0 * lam * B * p ** (2.0 / m))
        return prefactor * hyp2f1(1.0, (m - 1.0) / m, (m + 1.0) / m, -A * x / B)

    A, B = rp.A, rp.B
    radius = math.hypot(A, B)
    if radius == 0:
        raise SingularityError("v_+ vanishes identically for A = B = 0")
    phi = m * lam * zeta + math.atan2(A, B)
    y = math.cos(phi)
    try:
        arc = _arc_integral(y, m)
    except DivergenceError as exc:
        raise DomainError(str(exc), zeta=zeta)
    return -radius ** (-2.0 / m) * arc / (m * lam)


def u_m(
    rp: ReidParams,
    I_bc: float,
    b: float,
    c: float,
    sign: Sign = Sign.PLUS,
    theta0: float = 0.0,
) -> Callable[[float], complex]:
    """
    u = theta(Theta) v_m with theta from the separable theta equation and
    Theta in the orientation of the reference u solutions.
    """
    v = v_m(rp)
    orientation = PHASE_ORIENTATION[rp.branch]

    def u(zeta: float) -> complex:
        phase = orientation * theta_m(rp, zeta) - theta0
        return theta_of_phase(I_bc, b, c, phase, sign) * v(zeta)

    return u


def reference_u_m(m: int, branch: Branch, sign: Sign = Sign.PLUS) -> Callable[[float], complex]:
    """u_m at lambda = 1/2, unity amplitudes, and the branch constants of REFERENCE_CONSTANTS"""
    I_bc, b, c = REFERENCE_CONSTANTS[Branch(branch)]
    return u_m(ReidParams(m=m, branch=branch), I_bc, b, c, sign)
