"""
Validation Suites
Built-in parameter matrix certifying every closed form against the numerical
oracles. Each case is a zero-argument callable returning a ValidationReport;
cases run on a thread pool and are reported in a fixed order.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from eplab.core.config import Config
from eplab.core.errors import DomainError, EPLabError
from eplab.core.schemas import (
    Branch,
    EPParams,
    ErmakovPairState,
    PhaseAccumulator,
    PinneyCoeffs,
    ReidParams,
    Sign,
    Suite,
    ValidationReport,
)
from eplab.cli.figures import build_figure
from eplab.modules.abel_factor import (
    GeneralODECoeffs,
    abel_route,
    chiellini_coeffs,
    dphi1_dv,
    factorization_identities,
    first_factor_solution,
    phi_functions,
    remove_linear_term,
    second_order_rhs,
    to_abel_rhs,
)
from eplab.modules.chiellini import (
    abel_eta,
    amplitude_square,
    chiellini_alpha,
    chiellini_residual,
    g_lambda,
    general_k_time,
    general_solution_v,
    h_lambda,
    heq_residual,
    invert_quadrature,
    particular_vgamma,
    radicand,
    radicand_guard,
    reduced_dissipation,
    reduced_harmonic,
    shared_dissipation,
)
from eplab.modules.invariant_theorem import (
    dissipation_balance,
    ermakov_invariant,
    factor_invariant,
    factorization_constant,
    gen_erm_residual,
    general_solution_u,
    invariant_is_c1_check,
    invariant_via_factorization,
    milne_phase,
    wronskian_defect,
)
from eplab.modules.linear_core import make_basis, pinney_general, pinney_particular, sep_residual, sep_solutions
from eplab.modules.oracle import IVPProblem, adaptive_quadrature, derivative, integrate_ivp, residual_scan
from eplab.modules.reid import (
    reference_u_m,
    reid_general,
    reid_residual,
    theta_m,
    theta_m_quadrature,
    v_m,
    v_m_residual,
)
from eplab.modules.specfun import hyp2f1, real_value

logger = logging.getLogger(__name__)

Case = Tuple[str, Callable[[], ValidationReport]]

SUITE_ORDER = [Suite.RESIDUAL, Suite.INVARIANT, Suite.CHIELLINI, Suite.PHASE, Suite.FACTORIZATION, Suite.ABEL]

EXACT_TOLERANCE = 1e-8
PHASE_TOLERANCE = 1e-7
REDUCTION_TOLERANCE = 1e-9
IVP_TOLERANCE = 1e-6

# Radicand guard of the closed-form scans; Ridders loses digits closer to a turning point
TURNING_GUARD = 1e-4

# (lambda^2, c, c1, sign, window): real, nonvanishing windows of the closed forms
CHIELLINI_MATRIX = [
    (0.25, 1.0, 1.0, Sign.PLUS, (0.0, 2.4)),
    (0.25, 1.0, 1.0, Sign.MINUS, (1.95, 4.7)),
    (-0.25, 1.0, 1.0, Sign.PLUS, (-3.0, -0.5)),
    (-0.25, 1.0, 1.0, Sign.MINUS, (0.5, 3.0)),
    (0.0, 1.0, 1.0, Sign.PLUS, (1.6, 4.0)),
    (0.0, 1.0, 1.0, Sign.PLUS, (-4.0, -1.6)),
    (1.0, 0.5, 2.0, Sign.PLUS, (-0.1, 1.2)),
    (0.5, -0.05, 1.0, Sign.PLUS, (0.0, 6.0)),
    (-1.0, 2.0, 1.0, Sign.PLUS, (-1.5, -0.3)),
    (0.0, -1.0, 2.0, Sign.PLUS, (-3.0, 3.0)),
    (2.0, 1.0, 3.0, Sign.MINUS, (0.8, 1.55)),
]

# Real windows of v_m at lambda = 1/2 and unity amplitudes
REID_WINDOWS: Dict[Branch, Dict[int, Tuple[float, float]]] = {
    Branch.NEGATIVE: {m: (-2.0, 2.0) for m in (2, 3, 4, 5)},
    Branch.ZERO: {m: (0.0, 3.0) for m in (2, 3, 4, 5)},
    Branch.POSITIVE: {2: (0.0, 1.6), 3: (0.0, 0.95), 4: (0.0, 0.66), 5: (0.0, 0.5)},
}

FACTORIZATION_MATRIX = [
    (0.25, 1.0, 1.0), (-0.25, 1.0, 1.0), (0.0, 1.0, 1.0), (1.0, 0.5, 2.0),
    (0.5, -0.05, 1.0), (-1.0, 2.0, 1.0), (0.0, -1.0, 2.0), (2.0, 1.0, 3.0),
    (0.1, 0.2, 0.5), (-0.5, -0.1, 2.0), (0.3, 2.0, 0.1),
]

# Ascending stretch of v_+ at lambda^2 = 1/4, c = c1 = 1 (turning point at 1.11)
ASCENDING = EPParams(lambda2=0.25, c=1.0, c1=1.0, sign=Sign.PLUS)
ASCENDING_WINDOW = (0.0, 0.9)


# ============================================================================
# Helpers
# ============================================================================

def _report(
    check: str,
    case_id: str,
    residual: float,
    tolerance: float,
    worst_at: Optional[Sequence[float]] = None,
    samples: int = 0,
    monitored: bool = False,
    notes: str = "",
    passed: Optional[bool] = None,
) -> ValidationReport:
    residual = residual if math.isfinite(residual) else math.inf
    return ValidationReport(
        check=check,
        case_id=case_id,
        max_residual=residual,
        tolerance=tolerance,
        passed=(residual <= tolerance) if passed is None else passed,
        monitored=monitored,
        worst_at=list(worst_at or []),
        samples=samples,
        notes=notes,
    )


class _Worst:
    """Running maximum with ties resolved toward the smaller sample location"""

    def __init__(self):
        self.value = 0.0
        self.at: List[float] = []
        self.count = 0

    def add(self, value: float, at: float):
        self.count += 1
        value = value if math.isfinite(value) else math.inf
        if not self.at or value > self.value or (value == self.value and at < self.at[0]):
            self.value, self.at = value, [at]

    def report(self, check: str, case_id: str, tolerance: float, **kwargs) -> ValidationReport:
        if self.count == 0:
            return _report(check, case_id, math.inf, tolerance, notes="no usable samples", passed=False)
        return _report(check, case_id, self.value, tolerance, self.at, self.count, **kwargs)


def _real(f: Callable[[float], complex]) -> Callable[[float], float]:
    return lambda z: real_value(f(z), z)


def _relative(residual: Callable[[float, float, float, float], float]) -> Callable[[float, float, float, float], float]:
    """Residual scaled by max(1, |v''|), for amplitudes with steep stretches"""
    return lambda z, v, d1, d2: residual(z, v, d1, d2) / max(1.0, abs(d2))


def _closed_derivative(p: EPParams) -> Callable[[float], Tuple[float, float]]:
    """(v, v') of the closed form from w and w'"""
    w_of = amplitude_square(p)

    def state(zeta: float) -> Tuple[float, float]:
        w, dw = w_of(zeta)
        v = math.sqrt(real_value(w, zeta))
        return v, real_value(dw, zeta) / (2.0 * v)

    return state


# ============================================================================
# residual
# ============================================================================

def _sep_case(branch: Branch, lam: float, c: float, window: Tuple[float, float]) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        return residual_scan(
            _real(sep_solutions(branch, lam, c)), sep_residual(branch, lam, c), window,
            samples=401, tolerance=EXACT_TOLERANCE, check="sep-residual",
        )
    return run


def _pinney_general_case() -> ValidationReport:
    basis = make_basis(Branch.POSITIVE, 1.0)
    coeffs = PinneyCoeffs(alpha1=2.0, alpha2=1.0, alpha3=1.0, c=-1.0)
    return residual_scan(
        _real(pinney_general(basis, coeffs)), sep_residual(Branch.POSITIVE, 1.0, -1.0), (0.0, 10.0),
        samples=401, tolerance=EXACT_TOLERANCE, check="pinney-general",
    )


def _pinney_particular_case() -> ValidationReport:
    basis = make_basis(Branch.POSITIVE, 1.0)
    return residual_scan(
        _real(pinney_particular(basis, 1.0)), sep_residual(Branch.POSITIVE, 1.0, 1.0), (-0.6, 0.6),
        samples=401, check="pinney-particular",
    )


def _chiellini_closed_case(p: EPParams, window: Tuple[float, float]) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        return residual_scan(
            _real(general_solution_v(p)), _relative(heq_residual(p)), window, samples=401,
            guard=radicand_guard(p, TURNING_GUARD), check="chiellini-closed-form",
        )
    return run


def _reid_general_cases() -> List[Case]:
    rng = np.random.default_rng(2024)
    cases = []
    for m in (2, 3, 4):
        for i in range(5):
            branch = [Branch.POSITIVE, Branch.NEGATIVE, Branch.ZERO][int(rng.integers(3))]
            lam = float(rng.uniform(0.3, 1.0))
            c_tilde = float(rng.uniform(0.2, 2.0))
            basis = make_basis(branch, lam)
            rp = ReidParams(m=m, branch=branch, lam=lam, c_tilde=c_tilde)
            window = (0.0, 0.45 * math.pi / lam) if branch is Branch.POSITIVE else (0.0, 2.0)

            def run(basis=basis, rp=rp, window=window) -> ValidationReport:
                return residual_scan(
                    _real(reid_general(basis, rp)), _relative(reid_residual(basis, rp)), window,
                    samples=201, check="reid-general",
                )

            cases.append((f"reid-general-m{m}-{i}", run))
    return cases


def _v_m_cases() -> List[Case]:
    cases = []
    for branch, windows in REID_WINDOWS.items():
        for m, window in windows.items():
            rp = ReidParams(m=m, branch=branch)

            def run(rp=rp, window=window) -> ValidationReport:
                return residual_scan(
                    _real(v_m(rp)), v_m_residual(rp), window, samples=201,
                    tolerance=EXACT_TOLERANCE, check="reid-explicit",
                )

            cases.append((f"reid-v{branch.value}-m{m}", run))
    return cases


def residual_cases() -> List[Case]:
    cases: List[Case] = [
        ("sep-neg-1", _sep_case(Branch.NEGATIVE, 1.0, 0.5, (-2.0, 2.0))),
        ("sep-neg-2", _sep_case(Branch.NEGATIVE, 0.5, -1.0, (-3.0, 3.0))),
        ("sep-pos-1", _sep_case(Branch.POSITIVE, 1.0, -0.5, (0.0, 10.0))),
        ("sep-pos-2", _sep_case(Branch.POSITIVE, 2.0, -3.0, (0.0, 5.0))),
        ("sep-zero-1", _sep_case(Branch.ZERO, 0.0, -1.0, (-3.0, 3.0))),
        ("pinney-general", _pinney_general_case),
        ("pinney-particular", _pinney_particular_case),
    ]
    for i, (lambda2, c, c1, sign, window) in enumerate(CHIELLINI_MATRIX, start=1):
        p = EPParams(lambda2=lambda2, c=c, c1=c1, sign=sign)
        cases.append((f"chiellini-{i:02d}", _chiellini_closed_case(p, window)))
    return cases + _reid_general_cases() + _v_m_cases()


# ============================================================================
# invariant
# ============================================================================

UNDAMPED = dict(lambda2=0.25, b=-0.5, c=-1.0, y0=(1.0, 0.2, 1.5, -0.1), span=(0.0, 5.0))


def _pair_state(y: Sequence[float], b: float, c: float) -> ErmakovPairState:
    return ErmakovPairState(u=y[0], u_dot=y[1], v=y[2], v_dot=y[3], b=b, c=c)


def _undamped_trajectory(rel_tol: float = 1e-12, abs_tol: float = 1e-14):
    lambda2, b, c = UNDAMPED["lambda2"], UNDAMPED["b"], UNDAMPED["c"]

    def rhs(zeta, y):
        u, du, v, dv = y
        return du, -lambda2 * u - b / u ** 3, dv, -lambda2 * v - c / v ** 3

    return integrate_ivp(IVPProblem(rhs=rhs, y0=UNDAMPED["y0"], span=UNDAMPED["span"], rel_tol=rel_tol, abs_tol=abs_tol))


def _undamped_drift(rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> Tuple[float, float]:
    traj = _undamped_trajectory(rel_tol, abs_tol)
    traj.raise_if_halted()
    b, c = UNDAMPED["b"], UNDAMPED["c"]
    initial = ermakov_invariant(_pair_state(traj.states[0], b, c))
    worst, at = 0.0, 0.0
    for zeta in np.linspace(*UNDAMPED["span"], 501):
        drift = abs(ermakov_invariant(_pair_state(traj(float(zeta)), b, c)) - initial)
        if drift > worst:
            worst, at = drift, float(zeta)
    return worst, at


def _undamped_drift_case() -> ValidationReport:
    worst, at = _undamped_drift()
    return _report("invariant-drift", "undamped-drift", worst, EXACT_TOLERANCE, [at], 501)


def _drift_scaling_case() -> ValidationReport:
    tight, _ = _undamped_drift()
    loose, _ = _undamped_drift(1e-7, 1e-9)
    return _report(
        "invariant-drift", "undamped-drift-scaling", tight, EXACT_TOLERANCE, monitored=True,
        notes=f"drift {loose:.3e} at rtol 1e-7, {tight:.3e} at rtol 1e-12",
    )


def _damped_trajectory(b: float = -1.0):
    """(u, u', v, v', J) sharing the continued g of ASCENDING, J' = 2 g W^2"""
    g = shared_dissipation(ASCENDING)
    lambda2, c = ASCENDING.lambda2, ASCENDING.c
    v0, dv0 = _closed_derivative(ASCENDING)(ASCENDING_WINDOW[0])

    def rhs(zeta, y):
        u, du, v, dv, _ = y
        gz = g(zeta)
        wronskian = du * v - u * dv
        return (
            du, -gz * du - lambda2 * u - b / u ** 3,
            dv, -gz * dv - lambda2 * v - c / v ** 3,
            2.0 * gz * wronskian ** 2,
        )

    y0 = (1.2, 0.5, v0, dv0, 0.0)
    return integrate_ivp(IVPProblem(rhs=rhs, y0=y0, span=ASCENDING_WINDOW, rel_tol=1e-12, abs_tol=1e-14)), b


def _dissipation_balance_cases() -> List[Case]:
    def balance() -> ValidationReport:
        traj, b = _damped_trajectory()
        traj.raise_if_halted()
        initial = ermakov_invariant(_pair_state(traj.states[0], b, ASCENDING.c))
        v_closed = _real(general_solution_v(ASCENDING))
        balance_worst, amplitude_worst = _Worst(), _Worst()
        for zeta in np.linspace(*ASCENDING_WINDOW, 181):
            y = traj(float(zeta))
            invariant = ermakov_invariant(_pair_state(y, b, ASCENDING.c))
            balance_worst.add(abs(invariant - initial + y[4]), float(zeta))
            amplitude_worst.add(abs(y[2] - v_closed(float(zeta))), float(zeta))
        notes = f"shared amplitude vs closed form {amplitude_worst.value:.3e}"
        passed = balance_worst.value <= EXACT_TOLERANCE and amplitude_worst.value <= IVP_TOLERANCE
        return balance_worst.report("dissipation-balance", "damped-balance", EXACT_TOLERANCE, notes=notes, passed=passed)

    def trapezoid() -> ValidationReport:
        traj, b = _damped_trajectory()
        traj.raise_if_halted()
        g = shared_dissipation(ASCENDING)
        zetas = np.linspace(*ASCENDING_WINDOW, 4001)
        states = [_pair_state(traj(float(z)), b, ASCENDING.c) for z in zetas]
        defects = dissipation_balance(states, zetas, [g(float(z)) for z in zetas])
        worst = int(np.argmax(np.abs(defects)))
        return _report("dissipation-balance", "damped-balance-trapezoid", abs(defects[worst]), IVP_TOLERANCE,
                       [float(zetas[worst])], len(zetas))

    def raw_drift() -> ValidationReport:
        traj, b = _damped_trajectory()
        traj.raise_if_halted()
        values = [ermakov_invariant(_pair_state(s, b, ASCENDING.c)) for s in traj.states]
        drift = max(abs(x - values[0]) for x in values)
        return _report("invariant-drift", "damped-raw-drift", drift, EXACT_TOLERANCE, monitored=True,
                       notes="invariant is not conserved under shared dissipation")

    return [("damped-balance", balance), ("damped-balance-trapezoid", trapezoid), ("damped-raw-drift", raw_drift)]


# (lambda^2, c, gamma, b, I_bc, sign, theta0, window)
THEOREM_CASES = [
    (0.25, 1.0, 1.0, 1.0, 1.0, Sign.MINUS, -0.5, (0.0, 0.8)),
    (0.0, -1.0, 1.0, 1.0, 3.0, Sign.PLUS, 0.0, (0.1, 1.0)),
]


def _theorem_parts(case):
    lambda2, c, gamma, b, I_bc, sign, theta0, window = case
    p = EPParams(lambda2=lambda2, c=c, c1=gamma)
    acc = PhaseAccumulator(zeta_start=0.0, theta0=theta0, tolerance=1e-12)
    u = _real(general_solution_u(gamma, p, b, I_bc, sign, acc))
    return p, u, _closed_derivative(p), b, I_bc, window


def _theorem_roundtrip_case(index: int) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        p, u, v_state, b, I_bc, window = _theorem_parts(THEOREM_CASES[index])
        worst = _Worst()
        for zeta in np.linspace(*window, 41):
            zeta = float(zeta)
            v, dv = v_state(zeta)
            state = ErmakovPairState(u=u(zeta), u_dot=derivative(u, zeta, 1, step=0.01), v=v, v_dot=dv, b=b, c=p.c)
            worst.add(abs(ermakov_invariant(state) - I_bc), zeta)
        return worst.report("theorem-roundtrip", f"theorem-roundtrip-{index + 1}", IVP_TOLERANCE)
    return run


def _theorem_defect_case(index: int) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        p, u, v_state, b, _, window = _theorem_parts(THEOREM_CASES[index])
        g = shared_dissipation(p)
        residual = gen_erm_residual(g, p.lambda2, b)
        worst = _Worst()
        for zeta in np.linspace(*window, 21):
            zeta = float(zeta)
            try:
                value = u(zeta)
                du = derivative(u, zeta, 1, step=0.01)
                d2u = derivative(u, zeta, 2, step=0.01)
            except DomainError:
                continue
            v, dv = v_state(zeta)
            defect = wronskian_defect(g(zeta), du * v - value * dv, v)
            worst.add(abs(residual(zeta, value, du, d2u) - defect), zeta)
        return worst.report("theorem-defect", f"theorem-defect-{index + 1}", IVP_TOLERANCE)
    return run


def _theorem_residual_monitor() -> ValidationReport:
    p, u, _, b, _, window = _theorem_parts(THEOREM_CASES[0])
    g = shared_dissipation(p)
    report = residual_scan(u, gen_erm_residual(g, p.lambda2, b), window, samples=21,
                           check="theorem-residual", step=0.01)
    return report.model_copy(update={
        "monitored": True, "notes": "composition leaves g W / v under a shared g",
    })


def _invariant_recovery_cases() -> List[Case]:
    def first() -> ValidationReport:
        p = EPParams(lambda2=0.25, c=1.0, c1=1.0)
        return invariant_is_c1_check(p, b=1.0, gamma=1.0, I_bc=1.0, sign=Sign.MINUS, theta0=-0.5)

    def second() -> ValidationReport:
        p = EPParams(lambda2=0.0, c=-1.0, c1=1.0)
        return invariant_is_c1_check(p, b=1.0, gamma=1.0, I_bc=3.0, sign=Sign.PLUS, window=(0.0, 1.0))

    def perturbed() -> ValidationReport:
        p = EPParams(lambda2=0.25, c=1.0, c1=1.0)
        report = invariant_is_c1_check(p, b=1.0, gamma=1.0, I_bc=1.0, sign=Sign.MINUS, theta0=-0.5, theta_scale=1.001)
        return _report("invariant-is-c1", "invariant-c1-perturbed", report.max_residual, 1e-3,
                       passed=not report.passed and report.max_residual > 1e-6,
                       notes="scaled theta must break the invariant")

    return [("invariant-c1-positive", first), ("invariant-c1-zero", second), ("invariant-c1-perturbed", perturbed)]


def _factor_invariant_cases() -> List[Case]:
    def exact() -> ValidationReport:
        traj = _undamped_trajectory()
        traj.raise_if_halted()
        b, c = UNDAMPED["b"], UNDAMPED["c"]
        u0, _, v0, _ = traj.states[0]
        worst = _Worst()

        def log_slope_gap(z: float) -> float:
            u, du, v, dv = traj(z)
            return du / u - dv / v

        for zeta in np.linspace(0.25, UNDAMPED["span"][1], 20):
            zeta = float(zeta)
            u, du, v, dv = traj(zeta)
            integral = adaptive_quadrature(log_slope_gap, 0.0, zeta, 1e-12)
            args = (u / v, v, du / u, dv / v)
            reference = ermakov_invariant(_pair_state((u, du, v, dv), b, c))
            worst.add(abs(factor_invariant(*args, b, c, u0 / v0, integral) - reference), zeta)
        return worst.report("factor-invariant", "factor-invariant", PHASE_TOLERANCE)

    def cosh_form() -> ValidationReport:
        traj = _undamped_trajectory()
        traj.raise_if_halted()
        b, c = UNDAMPED["b"], UNDAMPED["c"]
        u0, _, v0, _ = traj.states[0]
        m_const = factorization_constant(b, c, u0, v0)
        worst = _Worst()
        for zeta in np.linspace(0.25, UNDAMPED["span"][1], 20):
            zeta = float(zeta)
            u, du, v, dv = traj(zeta)
            integral = math.log((u / v) / (u0 / v0))
            reference = ermakov_invariant(_pair_state((u, du, v, dv), b, c))
            worst.add(abs(invariant_via_factorization(u / v, v, du / u, dv / v, integral, m_const) - reference), zeta)
        return worst.report("factor-invariant", "factor-invariant-cosh", PHASE_TOLERANCE, monitored=True,
                            notes="cosh form of the factorized invariant")

    return [("factor-invariant", exact), ("factor-invariant-cosh", cosh_form)]


def invariant_cases() -> List[Case]:
    cases: List[Case] = [
        ("undamped-drift", _undamped_drift_case),
        ("undamped-drift-scaling", _drift_scaling_case),
    ]
    cases += _dissipation_balance_cases()
    for i in range(len(THEOREM_CASES)):
        cases.append((f"theorem-roundtrip-{i + 1}", _theorem_roundtrip_case(i)))
        cases.append((f"theorem-defect-{i + 1}", _theorem_defect_case(i)))
    cases.append(("theorem-residual", _theorem_residual_monitor))
    return cases + _invariant_recovery_cases() + _factor_invariant_cases()


# ============================================================================
# chiellini
# ============================================================================

def _condition_case(k: float) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        rng = np.random.default_rng(100 + int(k))
        worst = _Worst()
        accepted = 0
        while accepted < 5:
            p = EPParams(
                lambda2=float(rng.uniform(-1.0, 1.0)), c=float(rng.uniform(-1.0, 1.0)),
                c1=float(rng.uniform(1.0, 4.0)), k=k,
            )
            grid = [float(v) for v in np.linspace(0.5, 2.0, 200)
                    if min(radicand(v + d, p) for d in (-0.003, 0.0, 0.003)) >= 1.0]
            if len(grid) < 20:
                continue
            accepted += 1
            for v in grid:
                scale = max(1.0, abs(g_lambda(v, p)))
                worst.add(abs(chiellini_residual(v, p)) / scale, v)
        return worst.report("chiellini-condition", f"condition-k{k:+g}", EXACT_TOLERANCE)
    return run


def _perturbed_condition_case() -> ValidationReport:
    p = EPParams(lambda2=1.0, c=1.0, c1=3.0)
    residual = abs(chiellini_residual(1.2, p, g=lambda x: g_lambda(x, p) + 0.1))
    return _report("chiellini-condition", "condition-perturbed", residual, 1e-2, [1.2], 1,
                   passed=residual > 1e-2, notes="g + 0.1 must violate the condition")


def _eta_case() -> ValidationReport:
    v = _real(general_solution_v(ASCENDING))
    worst = _Worst()
    for zeta in np.linspace(*ASCENDING_WINDOW, 41):
        zeta = float(zeta)
        worst.add(abs(derivative(v, zeta) - abel_eta(v(zeta), ASCENDING)), zeta)
    return worst.report("abel-eta", "eta-vs-slope", PHASE_TOLERANCE)


def _inversion_case() -> ValidationReport:
    v = _real(general_solution_v(ASCENDING))
    v_limit = v(1.0)
    worst = _Worst()
    for zeta in np.linspace(0.05, ASCENDING_WINDOW[1], 18):
        zeta = float(zeta)
        worst.add(abs(invert_quadrature(ASCENDING, 1.0, 0.0, zeta, v_limit) - v(zeta)), zeta)
    return worst.report("quadrature-inversion", "quadrature-inversion", PHASE_TOLERANCE)


def _general_k_case() -> ValidationReport:
    p = EPParams(lambda2=0.25, c=1.0, c1=3.0, k=-1.0)
    alpha = max(chiellini_alpha(p.k))
    v_start = 1.0
    dv_start = alpha * math.sqrt(radicand(v_start, p)) / v_start
    t_end = general_k_time(p, v_start, 2.0, alpha)

    def rhs(zeta, y):
        v, dv = y
        return dv, -g_lambda(v, p) * dv - h_lambda(v, p)

    traj = integrate_ivp(IVPProblem(rhs=rhs, y0=(v_start, dv_start), span=(0.0, t_end)))
    traj.raise_if_halted()
    worst = _Worst()
    for target in np.linspace(1.1, 2.0, 10):
        t = general_k_time(p, v_start, float(target), alpha)
        worst.add(abs(traj(t)[0] - target), t)
    return worst.report("general-k", "general-k-minus-one", IVP_TOLERANCE)


def _gain_case(figure_id: int) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        series = build_figure(figure_id)
        values = [complex(x).real for x in series.curves["g"] if math.isfinite(complex(x).real)]
        lo, hi = min(values), max(values)
        both = lo < 0.0 < hi
        return _report("dissipation-gain", f"gain-figure-{figure_id}", 0.0 if both else 1.0, 0.5,
                       samples=len(values), notes=f"g range [{lo:.4g}, {hi:.4g}]")
    return run


def _reduced_ivp_case() -> ValidationReport:
    c1, lam = 1.0, 0.5
    lambda2 = lam * lam
    v1, _ = reduced_harmonic(c1, lam)

    def rhs(zeta, y):
        v, dv = y
        return dv, -reduced_dissipation(v, dv, c1, lambda2) * dv - lambda2 * v

    worst = _Worst()
    for end in (2.0, -2.0):
        traj = integrate_ivp(IVPProblem(rhs=rhs, y0=(0.0, math.sqrt(c1)), span=(0.0, end)))
        traj.raise_if_halted()
        for zeta in np.linspace(0.0, end, 41):
            worst.add(abs(traj(float(zeta))[0] - v1(float(zeta))), float(zeta))
    return worst.report("reduced-ivp", "reduced-ivp", IVP_TOLERANCE)


def chiellini_cases() -> List[Case]:
    cases: List[Case] = [(f"condition-k{k:+g}", _condition_case(k)) for k in (-2.0, -1.0, 1.0, 2.0)]
    cases += [
        ("condition-perturbed", _perturbed_condition_case),
        ("eta-vs-slope", _eta_case),
        ("quadrature-inversion", _inversion_case),
        ("general-k-minus-one", _general_k_case),
        ("reduced-ivp", _reduced_ivp_case),
    ]
    cases += [(f"gain-figure-{i}", _gain_case(i)) for i in (7, 8, 9)]
    return cases


# ============================================================================
# phase
# ============================================================================

def _hyp2f1_identity_case() -> ValidationReport:
    worst = _Worst()
    for z in np.linspace(0.01, 0.7, 50):
        z = float(z)
        worst.add(abs(z * hyp2f1(0.5, 1.0, 1.5, z * z) - math.atanh(z)) / abs(math.atanh(z)), z)
    for x in np.linspace(0.01, 10.0, 50):
        x = float(x)
        worst.add(abs(x * hyp2f1(0.5, 1.0, 1.5, -x * x) - math.atan(x)) / abs(math.atan(x)), x)
    return worst.report("hyp2f1-identity", "hyp2f1-elementary", 1e-10)


def _closed_vs_quadrature_case(branch: Branch, m: int) -> Callable[[], ValidationReport]:
    def run() -> ValidationReport:
        rp = ReidParams(m=m, branch=branch)
        start, end = REID_WINDOWS[branch][m]
        origin = theta_m(rp, start)
        worst = _Worst()
        for zeta in np.linspace(start, end, 21)[1:]:
            zeta = float(zeta)
            closed = theta_m(rp, zeta) - origin
            worst.add(abs(closed - theta_m_quadrature(rp, zeta, start=start)), zeta)
        return worst.report("phase-closed-form", f"phase-{branch.value}-m{m}", PHASE_TOLERANCE)
    return run


def _m2_phase_case() -> ValidationReport:
    worst = _Worst()
    zero = ReidParams(m=2, branch=Branch.ZERO)
    negative = ReidParams(m=2, branch=Branch.NEGATIVE)
    positive = ReidParams(m=2, branch=Branch.POSITIVE)
    for zeta in np.linspace(-3.0, 3.0, 61):
        zeta = float(zeta)
        worst.add(abs(theta_m(zero, zeta) - math.atan(zeta)), zeta)
    for zeta in np.linspace(-2.0, 2.0, 41):
        zeta = float(zeta)
        worst.add(abs(theta_m(negative, zeta) - math.atan(math.exp(zeta))), zeta)
    for zeta in np.linspace(-0.7, 2.3, 31):
        zeta = float(zeta)
        expected = -math.atanh(math.cos(zeta + math.pi / 4)) / math.sqrt(2.0)
        worst.add(abs(theta_m(positive, zeta) - expected), zeta)
    return worst.report("phase-reduction", "phase-m2-elementary", REDUCTION_TOLERANCE)


def _reference_m2_square(branch: Branch, sign: Sign, zeta: float) -> float:
    """u^2 of the elementary m = 2 solutions"""
    s = sign.sigma
    if branch is Branch.NEGATIVE:
        return (math.exp(zeta) + math.exp(-zeta)) * (-1.0 - s * math.sqrt(3.0) * math.sinh(math.sqrt(2.0) * math.atan(math.exp(zeta))))
    if branch is Branch.ZERO:
        return (zeta * zeta + 1.0) * (math.atan(zeta) ** 2 - 1.0)
    arg = math.atanh((math.cos(zeta) - math.sin(zeta)) / math.sqrt(2.0))
    return (math.cos(zeta) + math.sin(zeta)) * (1.0 + s * math.sqrt(5.0) * math.sin(arg))


def _m2_solution_case() -> ValidationReport:
    windows = {Branch.NEGATIVE: (-2.0, 2.0), Branch.ZERO: (-3.0, 3.0), Branch.POSITIVE: (-0.7, 2.3)}
    worst = _Worst()
    for branch, window in windows.items():
        for sign in (Sign.PLUS, Sign.MINUS):
            u = reference_u_m(2, branch, sign)
            for zeta in np.linspace(*window, 31):
                zeta = float(zeta)
                if branch is Branch.POSITIVE and abs(zeta + math.pi / 4) < 0.05:
                    continue
                expected = _reference_m2_square(branch, sign, zeta)
                got = u(zeta) ** 2
                worst.add(abs(got - expected) / max(1.0, abs(expected)), zeta)
    return worst.report("phase-reduction", "solution-m2-elementary", REDUCTION_TOLERANCE)


def _milne_closed_form(zeta: float) -> float:
    """Phase of 1 / (1 + sqrt5 sin(sqrt2 zeta)) from 0, valid while sqrt2 zeta < pi"""
    a, b, kappa = 1.0, math.sqrt(5.0), math.sqrt(2.0)
    root = math.sqrt(b * b - a * a)
    t = math.tan(kappa * zeta / 2.0)

    def log_ratio(t: float) -> float:
        return math.log((a * t + b - root) / (a * t + b + root))

    return (log_ratio(t) - log_ratio(0.0)) / (kappa * root)


def _milne_phase_case() -> ValidationReport:
    v = _real(particular_vgamma(1.0, ASCENDING))
    acc = PhaseAccumulator()
    worst = _Worst()
    for zeta in np.linspace(0.0, 1.0, 21):
        zeta = float(zeta)
        worst.add(abs(milne_phase(v, acc, zeta) - _milne_closed_form(zeta)), zeta)
    return worst.report("milne-phase", "milne-closed-form", EXACT_TOLERANCE)


def _amplitude_monitor() -> ValidationReport:
    peaks = {}
    for m in (2, 3, 4):
        u = reference_u_m(m, Branch.POSITIVE, Sign.PLUS)
        best = 0.0
        for zeta in np.linspace(0.0, 4.0, 201):
            try:
                best = max(best, abs(u(float(zeta))) ** 2)
            except EPLabError:
                continue
        peaks[m] = best
    growth = max(0.0, peaks[3] - peaks[2], peaks[4] - peaks[3])
    notes = ", ".join(f"m={m}: {value:.4g}" for m, value in peaks.items())
    return _report("amplitude-order", "amplitude-diminishing", growth, 0.0, monitored=True,
                   notes=f"max |u_+|^2 {notes}")


def _reference_positive_phase(m: int, zeta: float) -> float:
    """Positive-branch phase at lambda = 1/2, unity amplitudes, in the reference orientation"""
    phi = m * zeta / 2.0 + math.atan(m - 1.0)
    power_sum = math.cos(m * zeta / 2.0) + math.sin(m * zeta / 2.0) / (m - 1.0)
    prefactor = 2.0 * math.sin(phi) ** (2.0 / m) * math.cos(phi) / (m * power_sum ** (2.0 / m))
    return prefactor * hyp2f1(0.5, 0.5 + 1.0 / m, 1.5, math.cos(phi) ** 2)


def _orientation_monitor() -> ValidationReport:
    rp = ReidParams(m=3, branch=Branch.POSITIVE)
    worst = _Worst()
    for zeta in np.linspace(0.0, 0.9, 19):
        zeta = float(zeta)
        worst.add(abs(theta_m(rp, zeta) - _reference_positive_phase(3, zeta)), zeta)
    return worst.report("phase-orientation", "orientation-positive-m3", PHASE_TOLERANCE, monitored=True,
                        notes="integral and reference positive-branch phases run in opposite directions")


def phase_cases() -> List[Case]:
    cases: List[Case] = [("hyp2f1-elementary", _hyp2f1_identity_case)]
    for branch in (Branch.NEGATIVE, Branch.ZERO, Branch.POSITIVE):
        for m in (2, 3, 4, 5):
            cases.append((f"phase-{branch.value}-m{m}", _closed_vs_quadrature_case(branch, m)))
    cases += [
        ("phase-m2-elementary", _m2_phase_case),
        ("solution-m2-elementary", _m2_solution_case),
        ("milne-closed-form", _milne_phase_case),
        ("amplitude-diminishing", _amplitude_monitor),
        ("orientation-positive-m3", _orientation_monitor),
    ]
    return cases


# ============================================================================
# factorization
# ============================================================================

def _factorization_case(index: int, audit: bool) -> Callable[[], ValidationReport]:
    lambda2, c, c1 = FACTORIZATION_MATRIX[index]
    p = EPParams(lambda2=lambda2, c=c, c1=c1)

    def run() -> ValidationReport:
        worst = _Worst()
        for v in np.linspace(0.3, 2.5, 60):
            v = float(v)
            if audit:
                if min(radicand(v + d, p) for d in (-0.06, -0.03, 0.0, 0.03, 0.06)) < 0.1:
                    continue
                try:
                    numeric = derivative(lambda x: phi_functions(x, p)[0], v)
                except DomainError:
                    continue
                exact = dphi1_dv(v, p)
                worst.add(abs(numeric - exact) / max(1.0, abs(exact)), v)
            else:
                if radicand(v, p) < 0.05:
                    continue
                d_h, d_g = factorization_identities(v, p)
                scale = max(1.0, abs(h_lambda(v, p)), abs(g_lambda(v, p)))
                worst.add(max(abs(d_h), abs(d_g)) / scale, v)
        kind = "audit" if audit else "identity"
        tolerance = PHASE_TOLERANCE if audit else 1e-9
        return worst.report(f"factorization-{kind}", f"factor-{kind}-{index + 1:02d}", tolerance)

    return run


def factorization_cases() -> List[Case]:
    cases: List[Case] = []
    for i in range(len(FACTORIZATION_MATRIX)):
        cases.append((f"factor-identity-{i + 1:02d}", _factorization_case(i, audit=False)))
        cases.append((f"factor-audit-{i + 1:02d}", _factorization_case(i, audit=True)))
    return cases


# ============================================================================
# abel
# ============================================================================

def _abel_generic_case() -> ValidationReport:
    coeffs = GeneralODECoeffs(
        f0=lambda u: 0.0, f1=lambda u: 0.1, f2=lambda u: 0.3, f3=lambda u: u,
    )
    u0, du0, end = 0.5, 1.0, 0.5
    direct = integrate_ivp(IVPProblem(rhs=second_order_rhs(coeffs), y0=(u0, du0), span=(0.0, end)))
    direct.raise_if_halted()
    route = abel_route(coeffs, u0, du0, float(direct(end)[0]))
    route.raise_if_halted()
    worst = _Worst()
    for u, (_, zeta) in route.nodes():
        zeta = min(max(float(zeta), 0.0), end)
        worst.add(abs(direct(zeta)[0] - u), zeta)
    return worst.report("abel-route", "abel-generic", IVP_TOLERANCE)


def _abel_chiellini_case() -> ValidationReport:
    v_closed = _real(general_solution_v(ASCENDING))
    v0, dv0 = _closed_derivative(ASCENDING)(0.0)
    route = abel_route(chiellini_coeffs(ASCENDING), v0, dv0, v_closed(ASCENDING_WINDOW[1]))
    route.raise_if_halted()
    worst = _Worst()
    for v, (_, zeta) in route.nodes():
        zeta = min(max(float(zeta), 0.0), ASCENDING_WINDOW[1])
        worst.add(abs(v_closed(zeta) - v), zeta)
    return worst.report("abel-route", "abel-chiellini", IVP_TOLERANCE)


def _linear_removal_case() -> ValidationReport:
    rng = np.random.default_rng(7)
    a, b = rng.uniform(-0.5, 0.5, 4), rng.uniform(-0.5, 0.5, 4)
    coeffs = GeneralODECoeffs(*(lambda u, i=i: float(a[i] + b[i] * u) for i in range(4)))
    removal = remove_linear_term(coeffs, u_ref=0.0)
    span, y0 = (0.0, 0.5), 0.5

    def flow(c: GeneralODECoeffs, start: float):
        rhs = to_abel_rhs(c)
        traj = integrate_ivp(IVPProblem(rhs=lambda u, y: (rhs(u, y[0]),), y0=(start,), span=span))
        traj.raise_if_halted()
        return traj

    original = flow(coeffs, y0)
    transformed = flow(removal.coeffs, removal.to_transformed(0.0, y0))
    worst = _Worst()
    for u in np.linspace(*span, 11):
        u = float(u)
        y = original(u)[0]
        back = removal.to_original(u, transformed(u)[0])
        worst.add(abs(back - y) / max(1.0, abs(y)), u)
    return worst.report("linear-term-removal", "abel-linear-removal", PHASE_TOLERANCE)


def _first_factor_case() -> ValidationReport:
    v_closed = _real(general_solution_v(ASCENDING))
    start, end = 0.2, ASCENDING_WINDOW[1]
    traj = first_factor_solution(ASCENDING, v_closed(start), end, zeta_start=start)
    traj.raise_if_halted()
    worst = _Worst()
    for zeta in np.linspace(start, end, 15):
        zeta = float(zeta)
        worst.add(abs(traj(zeta)[0] - v_closed(zeta)), zeta)
    return worst.report("first-factor", "first-factor-ascending", PHASE_TOLERANCE)


def _first_factor_turning_case() -> ValidationReport:
    v_closed = _real(general_solution_v(ASCENDING))
    traj = first_factor_solution(ASCENDING, v_closed(0.2), 2.0, zeta_start=0.2)
    halted = traj.status in ("domain", "underflow")
    return _report("first-factor", "first-factor-turning-point", 0.0 if halted else 1.0, 0.5,
                   [traj.reached], len(traj.zeta), notes=f"status {traj.status} at zeta={traj.reached:.6g}")


def abel_cases() -> List[Case]:
    return [
        ("abel-generic", _abel_generic_case),
        ("abel-chiellini", _abel_chiellini_case),
        ("abel-linear-removal", _linear_removal_case),
        ("first-factor-ascending", _first_factor_case),
        ("first-factor-turning-point", _first_factor_turning_case),
    ]


# ============================================================================
# Running and reporting
# ============================================================================

SUITES: Dict[Suite, Callable[[], List[Case]]] = {
    Suite.RESIDUAL: residual_cases,
    Suite.INVARIANT: invariant_cases,
    Suite.CHIELLINI: chiellini_cases,
    Suite.PHASE: phase_cases,
    Suite.FACTORIZATION: factorization_cases,
    Suite.ABEL: abel_cases,
}


def _run_case(suite: Suite, case_id: str, case: Callable[[], ValidationReport]) -> ValidationReport:
    try:
        report = case()
    except (EPLabError, ArithmeticError) as exc:
        logger.warning(f"{suite.value} {case_id} raised {type(exc).__name__}: {exc}")
        report = _report("exception", case_id, math.inf, 0.0, passed=False, notes=f"{type(exc).__name__}: {exc}")
    return report.model_copy(update={"suite": suite.value, "case_id": case_id})


def run_suite(suite: Suite = Suite.ALL, workers: Optional[int] = None) -> List[ValidationReport]:
    """Run one suite (or all of them); reports come back in suite order, then case-id order"""
    selected = SUITE_ORDER if Suite(suite) is Suite.ALL else [Suite(suite)]
    jobs = [(s, case_id, case) for s in selected for case_id, case in SUITES[s]()]
    workers = workers or Config.VALIDATION_WORKERS
    logger.info(f"Running {len(jobs)} validation cases on {workers} worker(s)")

    if workers == 1:
        reports = [_run_case(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda job: _run_case(*job), jobs))

    order = {s.value: i for i, s in enumerate(SUITE_ORDER)}
    return sorted(reports, key=lambda r: (order[r.suite], r.case_id))


def all_passed(reports: Sequence[ValidationReport]) -> bool:
    """MONITOR entries never fail a run"""
    return all(r.passed or r.monitored for r in reports)


def write_report(reports: Sequence[ValidationReport], path: Path) -> Path:
    """One line per case: suite, case id, max residual, tolerance, status"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [r.line() for r in reports]
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote {len(lines)} validation lines to {path}")
    return path
