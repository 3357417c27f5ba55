"""
Abel Route and Factorization
Correspondence between u'' + f2 u' + f3 + f1 u'^2 + f0 u'^3 = 0 and the Abel
equation dy/du = f0 + f1 y + f2 y^2 + f3 y^3 (y = 1/u'), removal of the linear
Abel term, and the factoring functions Phi1, Phi2 of the dissipative SEP
operator.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from eplab.core.config import Config
from eplab.core.errors import DomainError, InvalidParameterError, SingularityError
from eplab.core.schemas import EPParams
from eplab.modules.chiellini import g_lambda, h_lambda, radicand
from eplab.modules.oracle import IVPProblem, Trajectory, adaptive_quadrature, integrate_ivp

logger = logging.getLogger(__name__)

Coefficient = Callable[[float], float]


def _zero(u: float) -> float:
    return 0.0


@dataclass(frozen=True)
class GeneralODECoeffs:
    """Coefficients of u'' + f2 u' + f3 + f1 u'^2 + f0 u'^3 = 0"""
    f0: Coefficient = _zero
    f1: Coefficient = _zero
    f2: Coefficient = _zero
    f3: Coefficient = _zero


def to_abel_rhs(coeffs: GeneralODECoeffs) -> Callable[[float, float], float]:
    """(u, y) -> f0 + f1 y + f2 y^2 + f3 y^3"""
    def rhs(u: float, y: float) -> float:
        return coeffs.f0(u) + y * (coeffs.f1(u) + y * (coeffs.f2(u) + y * coeffs.f3(u)))
    return rhs


def second_order_rhs(coeffs: GeneralODECoeffs) -> Callable[[float, np.ndarray], Tuple[float, float]]:
    """First-order system (u, u') of the second-order equation"""
    def rhs(zeta: float, state: np.ndarray) -> Tuple[float, float]:
        u, du = state
        d2u = -(coeffs.f2(u) * du + coeffs.f3(u) + coeffs.f1(u) * du ** 2 + coeffs.f0(u) * du ** 3)
        return du, d2u
    return rhs


def chiellini_coeffs(p: EPParams) -> GeneralODECoeffs:
    """f2 = g_lambda, f3 = h_lambda: the Abel equation of the dissipative SEP"""
    return GeneralODECoeffs(f2=lambda u: g_lambda(u, p), f3=lambda u: h_lambda(u, p))


def abel_route(coeffs: GeneralODECoeffs, u0: float, du0: float, u_end: float) -> Trajectory:
    """
    Integrate dy/du = Abel rhs together with dzeta/du = y from (u0, 1/du0).

    The trajectory is parametrized by u with state (y, zeta); it inverts to
    u(zeta) on the monotone window, which is what the second-order IVP gives.
    """
    if du0 == 0:
        raise SingularityError("the Abel route needs u'(0) != 0")
    abel = to_abel_rhs(coeffs)

    def rhs(u: float, state: np.ndarray) -> Tuple[float, float]:
        y, _ = state
        return abel(u, y), y

    return integrate_ivp(IVPProblem(rhs=rhs, y0=[1.0 / du0, 0.0], span=(u0, u_end)))


@dataclass(frozen=True)
class LinearTermRemoval:
    """
    Abel equation without the linear term.

    With F(u) = integral of f1 from u_ref, y_hat = y exp(-F) solves
    dy_hat/du = f0 e^-F + f2 e^F y_hat^2 + f3 e^(2F) y_hat^3.
    """
    coeffs: GeneralODECoeffs
    exponent: Callable[[float], float]

    def to_transformed(self, u: float, y: float) -> float:
        return y / self.exponent(u)

    def to_original(self, u: float, y_hat: float) -> float:
        return y_hat * self.exponent(u)


def remove_linear_term(coeffs: GeneralODECoeffs, u_ref: float = 0.0, tol: Optional[float] = None) -> LinearTermRemoval:
    """Coefficients of the Abel equation with f1 removed, and the map between solutions"""
    def exponent(u: float) -> float:
        return math.exp(adaptive_quadrature(coeffs.f1, u_ref, u, tol))

    transformed = GeneralODECoeffs(
        f0=lambda u: coeffs.f0(u) / exponent(u),
        f1=_zero,
        f2=lambda u: coeffs.f2(u) * exponent(u),
        f3=lambda u: coeffs.f3(u) * exponent(u) ** 2,
    )
    return LinearTermRemoval(transformed, exponent)


# ============================================================================
# Factoring functions
# ============================================================================

def _require_k_minus_two(p: EPParams):
    if p.k != -2:
        raise InvalidParameterError(f"the factorization is written for k = -2, got k = {p.k}")


def phi_functions(v: float, p: EPParams) -> Tuple[float, float]:
    """Phi1 = sqrt(-2 lambda^2 v^4 + c1 v^2 + 2c) / v^2, Phi2 = g_lambda(v)"""
    _require_k_minus_two(p)
    if v == 0:
        raise SingularityError("Phi1 is singular at v = 0")
    r = radicand(v, p)
    if r <= 0:
        raise DomainError(f"Phi1 radicand {r:.6g} <= 0 at v={v:.17g}")
    return math.sqrt(r) / (v * v), g_lambda(v, p)


def dphi1_dv(v: float, p: EPParams) -> float:
    """R' / (2 v^2 sqrt(R)) - 2 sqrt(R) / v^3, R' = -8 lambda^2 v^3 + 2 c1 v"""
    _require_k_minus_two(p)
    r = radicand(v, p)
    if r <= 0:
        raise DomainError(f"Phi1 radicand {r:.6g} <= 0 at v={v:.17g}")
    root = math.sqrt(r)
    slope = -8.0 * p.lambda2 * v ** 3 + 2.0 * p.c1 * v
    return slope / (2.0 * v * v * root) - 2.0 * root / v ** 3


def factorization_identities(v: float, p: EPParams, dphi1: Optional[float] = None) -> Tuple[float, float]:
    """
    Defects (h - Phi1 Phi2 v, g + Phi1 + Phi2 + v dPhi1/dv).

    dphi1 overrides the analytic slope, for auditing a numerical one.
    """
    phi1, phi2 = phi_functions(v, p)
    slope = dphi1_dv(v, p) if dphi1 is None else dphi1
    return h_lambda(v, p) - phi1 * phi2 * v, g_lambda(v, p) + phi1 + phi2 + v * slope


def first_factor_solution(
    p: EPParams, v_init: float, zeta_end: float, zeta_start: float = 0.0,
    phi1: Optional[Callable[[float], float]] = None,
) -> Trajectory:
    """
    Flow of the first factor, u' = Phi1(u) u, from u(zeta_start) = v_init.

    It generates the ascending solutions of the dissipative SEP; a turning
    point ends the integration with a domain report in the trajectory.
    """
    threshold = Config.RADICAND_GUARD * max(1.0, p.c1 * p.c1)

    def default_phi1(u: float) -> float:
        if radicand(u, p) < threshold:
            raise DomainError(f"turning point reached at u={u:.17g}")
        return phi_functions(u, p)[0]

    phi1 = phi1 or default_phi1

    def rhs(zeta: float, state: np.ndarray) -> Tuple[float]:
        u = state[0]
        return (phi1(u) * u,)

    return integrate_ivp(IVPProblem(rhs=rhs, y0=[v_init], span=(zeta_start, zeta_end)))
