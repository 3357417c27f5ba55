"""
Chiellini Dissipation
The dissipation-gain function g(v) built from h(v) = lambda^2 v + c v^-3 by
Chiellini's integrability condition d/dv(h/g) = k g, the Abel quadrature
route at k = -2, and the closed-form general solutions of

    v'' + g(v) v' + h(v) = 0.
"""
import logging
import math
from typing import Callable, Optional, Tuple

from scipy.optimize import brentq

from eplab.core.config import Config
from eplab.core.errors import DomainError, InvalidParameterError, SingularityError
from eplab.core.schemas import Branch, EPParams
from eplab.modules.oracle import adaptive_quadrature
from eplab.modules.specfun import principal_sqrt

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
CHIELLINI_STEP = 5e-4


# ============================================================================
# Restoring force, dissipation and the integrability condition
# ============================================================================

def radicand(v: float, p: EPParams) -> float:
    """k lambda^2 v^4 + c1 v^2 - k c"""
    return p.k * p.lambda2 * v ** 4 + p.c1 * v * v - p.k * p.c


def h_lambda(v: float, p: EPParams) -> float:
    if v == 0:
        raise SingularityError("h_lambda is singular at v = 0")
    return p.lambda2 * v + p.c / v ** 3


def g_lambda(v: float, p: EPParams) -> float:
    """(lambda^2 v^2 + c v^-2) / sqrt(k lambda^2 v^4 + c1 v^2 - k c), principal root"""
    if v == 0:
        raise SingularityError("g_lambda is singular at v = 0")
    r = radicand(v, p)
    if r <= 0:
        raise DomainError(f"g_lambda radicand {r:.6g} <= 0 at v={v:.17g}")
    return (p.lambda2 * v * v + p.c / (v * v)) / math.sqrt(r)


def chiellini_residual(v: float, p: EPParams, g: Optional[Callable[[float], float]] = None) -> float:
    """
    d/dv(h/g) - k g at v, with the derivative from a five-point central stencil.

    Pass g to test a modified dissipation against the same condition.
    """
    g = g or (lambda x: g_lambda(x, p))

    def ratio(x: float) -> float:
        gx = g(x)
        if gx == 0:
            raise SingularityError(f"g vanishes at v={x:.17g}, h/g is undefined")
        return h_lambda(x, p) / gx

    d = CHIELLINI_STEP * max(1.0, abs(v))
    slope = (ratio(v - 2 * d) - 8 * ratio(v - d) + 8 * ratio(v + d) - ratio(v + 2 * d)) / (12 * d)
    return slope - p.k * g(v)


def chiellini_alpha(k: float) -> Tuple[float, ...]:
    """
    Real roots of k alpha^2 + alpha + 1 = 0.

    v' = alpha h/g turns the Chiellini condition into a first integral;
    k = -2 gives alpha in {-1/2, 1}.
    """
    disc = 1.0 - 4.0 * k
    if k == 0 or disc < 0:
        raise InvalidParameterError(f"no real Chiellini multiplier for k = {k}")
    root = math.sqrt(disc)
    return tuple(sorted(((-1.0 - root) / (2 * k), (-1.0 + root) / (2 * k))))


def _require_closed_form(p: EPParams):
    if p.k != -2:
        raise InvalidParameterError(f"closed-form Chiellini solutions exist only for k = -2, got k = {p.k}")


def abel_eta(v: float, p: EPParams) -> float:
    """eta = h/g at k = -2 = sqrt(-2 lambda^2 v^4 + c1 v^2 + 2c) / v"""
    _require_closed_form(p)
    if v == 0:
        raise SingularityError("eta is singular at v = 0")
    r = radicand(v, p)
    if r < 0:
        raise DomainError(f"eta radicand {r:.6g} < 0 at v={v:.17g}")
    return math.sqrt(r) / v


# ============================================================================
# Closed-form general solutions (k = -2)
# ============================================================================

def amplitude_square(p: EPParams) -> Callable[[float], Tuple[complex, complex]]:
    """
    w = v^2 of the closed-form general solution and dw/dzeta.

    w satisfies (w')^2 = 4(-2 lambda^2 w^2 + c1 w + 2c) on every branch.
    """
    _require_closed_form(p)
    sigma = p.sign.sigma
    c, c1, z0 = p.c, p.c1, p.zeta0

    if p.branch is Branch.ZERO:
        if c1 == 0:
            raise InvalidParameterError("the lambda^2 = 0 branch requires c1 != 0")

        def zero(zeta: float) -> Tuple[complex, complex]:
            s = zeta - z0
            return complex(c1 * s * s - 2.0 * c / c1), complex(2.0 * c1 * s)
        return zero

    lam = p.lam
    kappa = 2.0 * SQRT2 * lam
    den = 4.0 * lam * lam

    if p.branch is Branch.POSITIVE:
        inner = principal_sqrt(16.0 * lam * lam * c + c1 * c1)

        def positive(zeta: float) -> Tuple[complex, complex]:
            s = zeta - z0
            return (
                (c1 + sigma * inner * math.sin(kappa * s)) / den,
                sigma * inner * kappa * math.cos(kappa * s) / den,
            )
        return positive

    inner = principal_sqrt(16.0 * lam * lam * c - c1 * c1)

    def negative(zeta: float) -> Tuple[complex, complex]:
        s = zeta - z0
        return (
            (-c1 - sigma * inner * math.sinh(kappa * s)) / den,
            -sigma * inner * kappa * math.cosh(kappa * s) / den,
        )
    return negative


def general_solution_v(p: EPParams) -> Callable[[float], complex]:
    """v_-, v_0 or v_+ by the sign of lambda^2; PLUS takes the upper stacked symbol."""
    w = amplitude_square(p)
    return lambda zeta: principal_sqrt(w(zeta)[0])


def particular_vgamma(gamma: float, p: EPParams) -> Callable[[float], complex]:
    return general_solution_v(p.model_copy(update={"zeta0": 0.0, "c1": gamma}))


def continued_dissipation(v: float, dv: float, p: EPParams) -> float:
    """
    g continued across turning points: the principal g times sign(v v').

    The closed forms solve v'' + g v' + h = 0 with this g on both halves of
    each oscillation; the principal branch holds only where v v' > 0.
    """
    if v == 0:
        raise SingularityError("g is singular at v = 0")
    r = radicand(v, p)
    if r <= 0:
        raise DomainError(f"radicand {r:.6g} <= 0 at v={v:.17g}")
    orientation = 1.0 if v * dv >= 0 else -1.0
    return (p.lambda2 * v * v + p.c / (v * v)) / (orientation * math.sqrt(r))


def heq_residual(p: EPParams) -> Callable[[float, float, float, float], float]:
    """v'' + g v' + h(v) in the residual_scan signature, with the continued g"""
    def residual(zeta: float, v: float, dv: float, d2v: float) -> float:
        return d2v + continued_dissipation(v, dv, p) * dv + h_lambda(v, p)
    return residual


def radicand_guard(p: EPParams, threshold: Optional[float] = None) -> Callable[[float, float], bool]:
    """True inside the turning-point guard band, scaled by max(1, c1^2)"""
    threshold = (threshold or Config.RADICAND_GUARD) * max(1.0, p.c1 * p.c1)
    return lambda zeta, v: radicand(v, p) < threshold


def dissipation_along(p: EPParams) -> Callable[[float], float]:
    """
    g(zeta) along the closed-form solution, principal branch, computed from
    w = v^2 so that it stays real where v is imaginary.
    """
    w_of = amplitude_square(p)

    def g(zeta: float) -> float:
        w, _ = w_of(zeta)
        if abs(w.imag) > 1e-12 * max(1.0, abs(w.real)):
            raise DomainError(f"amplitude square not real at zeta={zeta:.17g}", zeta=zeta)
        w = w.real
        if w == 0:
            raise SingularityError(f"g singular at zeta={zeta:.17g}", zeta=zeta)
        r = -2.0 * p.lambda2 * w * w + p.c1 * w + 2.0 * p.c
        if r <= 0:
            raise DomainError(f"g radicand {r:.6g} <= 0 at zeta={zeta:.17g}", zeta=zeta)
        return (p.lambda2 * w + p.c / w) / math.sqrt(r)

    return g


def shared_dissipation(p: EPParams) -> Callable[[float], float]:
    """Continued g(zeta) = (lambda^2 w + c/w) / (w'/2) along the closed form"""
    w_of = amplitude_square(p)

    def g(zeta: float) -> float:
        w, dw = w_of(zeta)
        if w.imag != 0.0 or dw.imag != 0.0:
            raise DomainError(f"amplitude square not real at zeta={zeta:.17g}", zeta=zeta)
        if w.real == 0 or dw.real == 0:
            raise SingularityError(f"g singular at zeta={zeta:.17g}", zeta=zeta)
        return (p.lambda2 * w.real + p.c / w.real) / (0.5 * dw.real)

    return g


# ============================================================================
# Reduced equation (c = 0)
# ============================================================================

def reduced_harmonic(c1: float, lam: float) -> Tuple[Callable[[float], float], Callable[[float], float]]:
    """Harmonic solutions of v'' + g v' + lambda^2 v = 0 at c = 0"""
    if not (lam > 0 and c1 > 0):
        raise InvalidParameterError(f"reduced harmonic solutions need lambda > 0 and c1 > 0, got {lam}, {c1}")
    amplitude = math.sqrt(c1) / (SQRT2 * lam)
    omega = SQRT2 * lam
    return (lambda z: amplitude * math.sin(omega * z)), (lambda z: amplitude * math.cos(omega * z))


def reduced_dissipation(v: float, dv: float, c1: float, lambda2: float) -> float:
    """
    g at c = 0 with the removable v = 0 singularity cancelled analytically:
    lambda^2 v sign(v') / sqrt(c1 - 2 lambda^2 v^2).
    """
    q = c1 - 2.0 * lambda2 * v * v
    if q <= 0:
        raise DomainError(f"reduced dissipation radicand {q:.6g} <= 0 at v={v:.17g}")
    orientation = 1.0 if dv >= 0 else -1.0
    return lambda2 * v * orientation / math.sqrt(q)


# ============================================================================
# Quadrature route
# ============================================================================

def quadrature_time(p: EPParams, v_a: float, v_b: float, tol: Optional[float] = None) -> float:
    """zeta(v_b) - zeta(v_a) = integral of v / sqrt(-2 lambda^2 v^4 + c1 v^2 + 2c) on an ascending segment"""
    _require_closed_form(p)

    def integrand(v: float) -> float:
        r = radicand(v, p)
        if r <= 0:
            raise DomainError(f"quadrature radicand {r:.6g} <= 0 at v={v:.17g}")
        return v / math.sqrt(r)

    return adaptive_quadrature(integrand, v_a, v_b, tol)


def invert_quadrature(p: EPParams, v_start: float, zeta_start: float, zeta: float, v_limit: float) -> float:
    """
    Amplitude reached at zeta on the ascending segment that starts at
    (zeta_start, v_start); v_limit bounds the search bracket.
    """
    if zeta == zeta_start:
        return v_start

    def mismatch(v: float) -> float:
        return zeta_start + quadrature_time(p, v_start, v) - zeta

    lo, hi = sorted((v_start, v_limit))
    if mismatch(lo) * mismatch(hi) > 0:
        raise DomainError(f"zeta={zeta:.17g} not reached on the segment [{lo}, {hi}]", zeta=zeta)
    return brentq(mismatch, lo, hi, xtol=1e-14, rtol=1e-14)


def general_k_time(p: EPParams, v_a: float, v_b: float, alpha: float, tol: Optional[float] = None) -> float:
    """
    Time to go from v_a to v_b along v' = alpha h/g = alpha sqrt(R)/v for any k.

    Oracle only; there are no closed forms away from k = -2.
    """
    def integrand(v: float) -> float:
        r = radicand(v, p)
        if r <= 0:
            raise DomainError(f"radicand {r:.6g} <= 0 at v={v:.17g}")
        return v / (alpha * math.sqrt(r))

    return adaptive_quadrature(integrand, v_a, v_b, tol)
