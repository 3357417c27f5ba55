"""
Numerical Oracles
Adaptive IVP integration, adaptive quadrature, Richardson-extrapolated
differentiation and residual scanning. Every closed form is certified
against these.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import DOP853, RK45, IntegrationWarning, OdeSolution, quad

from eplab.core.config import Config
from eplab.core.errors import (
    DomainError,
    IntegrandError,
    IntegrationHalted,
    InvalidParameterError,
    NonConvergenceError,
)
from eplab.core.schemas import ValidationReport

logger = logging.getLogger(__name__)

SOLVERS = {"RK45": RK45, "DOP853": DOP853}


# ============================================================================
# IVP integration
# ============================================================================

@dataclass
class IVPProblem:
    """First-order system y' = rhs(zeta, y) on span = (zeta_a, zeta_b)"""
    rhs: Callable[[float, np.ndarray], Sequence[float]]
    y0: Sequence[float]
    span: Tuple[float, float]
    rel_tol: float = field(default_factory=lambda: Config.IVP_RTOL)
    abs_tol: float = field(default_factory=lambda: Config.IVP_ATOL)
    max_step: float = math.inf
    method: str = field(default_factory=lambda: Config.IVP_METHOD)

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidParameterError("IVP tolerances must be positive")
        if self.span[0] == self.span[1]:
            raise InvalidParameterError("IVP span must have distinct end points")
        if self.method not in SOLVERS:
            raise InvalidParameterError(f"unknown IVP method {self.method!r}; choose from {sorted(SOLVERS)}")


@dataclass
class Trajectory:
    """Accepted steps of an integration plus the dense interpolant between them"""
    zeta: np.ndarray
    states: np.ndarray
    status: str = "completed"
    message: str = ""
    dense: Optional[OdeSolution] = field(default=None, repr=False)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    @property
    def reached(self) -> float:
        return float(self.zeta[-1])

    def nodes(self) -> List[Tuple[float, np.ndarray]]:
        return list(zip(self.zeta.tolist(), self.states))

    def __call__(self, zeta: float) -> np.ndarray:
        lo, hi = sorted((float(self.zeta[0]), float(self.zeta[-1])))
        if not lo <= zeta <= hi:
            raise DomainError(f"zeta={zeta:.17g} outside the integrated range [{lo}, {hi}]", zeta=zeta)
        if self.dense is None:
            return self.states[0].copy()
        return self.dense(zeta)

    def raise_if_halted(self):
        if not self.completed:
            raise IntegrationHalted(self.status, self.reached, self.message)


def _guarded(rhs: Callable) -> Callable:
    def fun(t, y):
        try:
            out = np.asarray(rhs(t, y), dtype=float)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(f"rhs failed at zeta={t:.17g}: {exc}", zeta=t)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"rhs not finite at zeta={t:.17g}", zeta=t)
        return out
    return fun


def integrate_ivp(problem: IVPProblem) -> Trajectory:
    """
    Integrate with one embedded Runge-Kutta pair, stepping manually so that a
    domain failure or a collapsing step ends the run with a report instead of
    an exception.
    """
    fun = _guarded(problem.rhs)
    t0, t_bound = problem.span
    y0 = np.asarray(problem.y0, dtype=float)
    ts = [float(t0)]
    ys = [y0.copy()]
    interpolants = []
    status, message = "completed", ""

    try:
        solver = SOLVERS[problem.method](
            fun, t0, y0, t_bound,
            rtol=problem.rel_tol, atol=problem.abs_tol, max_step=problem.max_step,
        )
    except DomainError as exc:
        return Trajectory(np.array(ts), np.array(ys), "domain", str(exc))

    while solver.status == "running":
        try:
            step_message = solver.step()
        except DomainError as exc:
            status, message = "domain", str(exc)
            break
        if solver.status == "failed":
            status = "underflow"
            message = step_message or f"step size collapsed near zeta={solver.t:.17g}"
            break
        interpolants.append(solver.dense_output())
        ts.append(float(solver.t))
        ys.append(solver.y.copy())

    if status != "completed":
        logger.info(f"Integration halted ({status}) at zeta={ts[-1]:.6g}: {message}")

    dense = OdeSolution(ts, interpolants) if interpolants else None
    return Trajectory(np.array(ts), np.array(ys), status, message, dense)


# ============================================================================
# Quadrature
# ============================================================================

def adaptive_quadrature(f: Callable[[float], float], a: float, b: float, tol: Optional[float] = None) -> float:
    """Gauss-Kronrod adaptive quadrature (QUADPACK) with error |err| <= tol * max(1, |I|)."""
    tol = tol or Config.QUAD_TOLERANCE
    if a == b:
        return 0.0

    def integrand(x: float) -> float:
        try:
            y = f(x)
        except ZeroDivisionError:
            raise IntegrandError(f"integrand singular at zeta={x:.17g}", zeta=x)
        if isinstance(y, complex):
            if y.imag != 0.0:
                raise IntegrandError(f"integrand complex at zeta={x:.17g}", zeta=x)
            y = y.real
        if not math.isfinite(y):
            raise IntegrandError(f"integrand not finite at zeta={x:.17g}", zeta=x)
        return y

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(integrand, a, b, epsabs=tol, epsrel=max(tol, 1e-13), limit=Config.QUAD_LIMIT)
        except IntegrationWarning as exc:
            raise NonConvergenceError(f"quadrature on [{a}, {b}] did not converge: {exc}")
    return float(value)


# ============================================================================
# Differentiation
# ============================================================================

def _difference(f: Callable[[float], float], z: float, h: float, order: int) -> float:
    if order == 1:
        return (f(z + h) - f(z - h)) / (2.0 * h)
    return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h)


def derivative(f: Callable[[float], float], z: float, order: int = 1, step: Optional[float] = None) -> float:
    """
    Ridders' method: central differences on a shrinking step, extrapolated
    in h^2 and stopped when the tableau error starts to grow.
    """
    if order not in (1, 2):
        raise InvalidParameterError(f"derivative order must be 1 or 2, got {order}")

    def sample(x: float) -> float:
        y = f(x)
        if isinstance(y, complex):
            if y.imag != 0.0:
                raise DomainError(f"complex sample at zeta={x:.17g}", zeta=x)
            y = y.real
        if not math.isfinite(y):
            raise DomainError(f"non-finite sample at zeta={x:.17g}", zeta=x)
        return y

    shrink, shrink2, size, safe = 1.4, 1.96, 10, 2.0
    h = step or Config.DERIVATIVE_STEP
    table = np.zeros((size, size))
    table[0, 0] = _difference(sample, z, h, order)
    best, err = table[0, 0], math.inf
    for i in range(1, size):
        h /= shrink
        table[0, i] = _difference(sample, z, h, order)
        fac = shrink2
        for j in range(1, i + 1):
            table[j, i] = (table[j - 1, i] * fac - table[j - 1, i - 1]) / (fac - 1.0)
            fac *= shrink2
            errt = max(abs(table[j, i] - table[j - 1, i]), abs(table[j, i] - table[j - 1, i - 1]))
            if errt <= err:
                err, best = errt, table[j, i]
        if abs(table[i, i] - table[i - 1, i - 1]) >= safe * err:
            break
    return float(best)


def local_step(f: Callable[[float], float], z: float, v: float, step: Optional[float] = None) -> float:
    """
    Initial Ridders step at z, shrunk to a fraction of |v|/|v'|.

    Square-root amplitudes have branch points about |v|/(2|v'|) away from z;
    a fixed step reaches across them and samples the complex side.
    """
    h = step or Config.DERIVATIVE_STEP
    delta = 1e-6 * max(1.0, abs(z))
    try:
        slope = abs(f(z + delta) - f(z - delta)) / (2.0 * delta)
    except (DomainError, ArithmeticError, TypeError, ValueError):
        return h
    if not math.isfinite(slope) or slope == 0.0:
        return h
    return max(min(h, Config.DERIVATIVE_STEP_FRACTION * abs(v) / slope), Config.DERIVATIVE_MIN_STEP)


# ============================================================================
# Residual scanning
# ============================================================================

def residual_scan(
    sol: Callable[[float], float],
    ode_residual: Callable[[float, float, float, float], float],
    window: Tuple[float, float],
    samples: int = 201,
    guard: Optional[Callable[[float, float], bool]] = None,
    tolerance: Optional[float] = None,
    check: str = "ode-residual",
    case_id: str = "",
    step: Optional[float] = None,
) -> ValidationReport:
    """
    Evaluate an ODE residual along a solution, differentiating numerically
    with a step sized to the local distance from the nearest zero of v.

    Points with |v| below the amplitude guard, points the guard predicate
    rejects, and points where the solution leaves its real domain are skipped
    and counted. The worst residual wins ties by smaller zeta.
    """
    tolerance = tolerance if tolerance is not None else Config.validation_tolerance()
    results: List[Tuple[float, float]] = []
    skipped = 0
    for z in np.linspace(window[0], window[1], samples):
        z = float(z)
        try:
            v = sol(z)
            if abs(v) < Config.AMPLITUDE_GUARD or (guard is not None and guard(z, v)):
                skipped += 1
                continue
            h = local_step(sol, z, v, step)
            d1 = derivative(sol, z, 1, h)
            d2 = derivative(sol, z, 2, h)
            r = abs(ode_residual(z, v, d1, d2))
        except DomainError:
            skipped += 1
            continue
        results.append((r if math.isfinite(r) else math.inf, z))

    skipped_fraction = skipped / samples
    if skipped:
        logger.debug(f"{check} {case_id}: skipped {skipped}/{samples} guard-banded points")
    if not results:
        return ValidationReport(
            check=check, case_id=case_id, max_residual=math.inf, tolerance=tolerance,
            passed=False, samples=0, skipped_fraction=1.0, notes="all points skipped",
        )

    results.sort(key=lambda item: (-item[0], item[1]))
    worst = results[0][0]
    return ValidationReport(
        check=check,
        case_id=case_id,
        max_residual=worst,
        tolerance=tolerance,
        passed=worst <= tolerance,
        worst_at=[z for _, z in results[:3]],
        samples=len(results),
        skipped_fraction=skipped_fraction,
    )
