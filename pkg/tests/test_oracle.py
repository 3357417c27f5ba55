"""
Tests for the numerical oracles: IVP integration, quadrature,
differentiation and residual scanning.
"""

import cmath
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from eplab.core.errors import (
    DomainError,
    IntegrandError,
    IntegrationHalted,
    InvalidParameterError,
    NonConvergenceError,
)
from eplab.modules.oracle import (
    IVPProblem,
    adaptive_quadrature,
    derivative,
    integrate_ivp,
    local_step,
    residual_scan,
)


def _harmonic(zeta, y):
    return [y[1], -y[0]]


class TestIntegrateIVP:
    """Adaptive Runge-Kutta integration with halting reports."""

    def test_harmonic_oscillator(self):
        traj = integrate_ivp(IVPProblem(_harmonic, [0.0, 1.0], (0.0, 2.0 * math.pi)))
        assert traj.completed
        for zeta, state in traj.nodes():
            assert state[0] == pytest.approx(math.sin(zeta), abs=1e-8)

    def test_dense_output_between_nodes(self):
        traj = integrate_ivp(IVPProblem(_harmonic, [1.0, 0.0], (0.0, 3.0)))
        assert traj(1.234)[0] == pytest.approx(math.cos(1.234), abs=1e-8)

    def test_backward_span(self):
        traj = integrate_ivp(IVPProblem(_harmonic, [0.0, 1.0], (0.0, -2.0)))
        assert traj.completed
        assert traj.reached == pytest.approx(-2.0)
        assert traj(-2.0)[0] == pytest.approx(math.sin(-2.0), abs=1e-8)

    def test_rk45_method(self):
        traj = integrate_ivp(IVPProblem(_harmonic, [0.0, 1.0], (0.0, 1.0), method="RK45"))
        assert traj(1.0)[0] == pytest.approx(math.sin(1.0), abs=1e-8)

    def test_domain_failure_halts_with_report(self):
        """An rhs leaving its domain ends the run with status 'domain'."""
        def rhs(zeta, y):
            if y[0] > 1.5:
                raise DomainError("left the domain", zeta=zeta)
            return [1.0]

        traj = integrate_ivp(IVPProblem(rhs, [0.0], (0.0, 2.0)))
        assert traj.status == "domain"
        assert not traj.completed
        assert traj.reached <= 1.5
        with pytest.raises(IntegrationHalted) as info:
            traj.raise_if_halted()
        assert info.value.reason == "domain"

    def test_non_finite_rhs_is_a_domain_failure(self):
        traj = integrate_ivp(IVPProblem(lambda z, y: [math.nan], [0.0], (0.0, 1.0)))
        assert traj.status == "domain"
        assert traj.reached == 0.0

    def test_zero_division_is_a_domain_failure(self):
        """y' = -1/(2y) reaches y = 0 at zeta = 1"""
        traj = integrate_ivp(IVPProblem(lambda z, y: [-1.0 / (2.0 * y[0])], [1.0], (0.0, 2.0)))
        assert not traj.completed
        assert traj.reached <= 1.0 + 1e-6

    def test_evaluation_outside_range(self):
        traj = integrate_ivp(IVPProblem(_harmonic, [0.0, 1.0], (0.0, 1.0)))
        with pytest.raises(DomainError):
            traj(1.5)

    @pytest.mark.parametrize("kwargs", [
        {"rel_tol": 0.0},
        {"abs_tol": -1.0},
        {"method": "Euler"},
        {"span": (1.0, 1.0)},
    ])
    def test_invalid_problem(self, kwargs):
        base = {"rhs": _harmonic, "y0": [0.0, 1.0], "span": (0.0, 1.0)}
        base.update(kwargs)
        with pytest.raises(InvalidParameterError):
            IVPProblem(**base)


class TestAdaptiveQuadrature:
    """QUADPACK wrapper with domain-aware integrand checks."""

    def test_sine_integral(self):
        assert adaptive_quadrature(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)

    def test_reversed_limits(self):
        assert adaptive_quadrature(math.sin, math.pi, 0.0) == pytest.approx(-2.0, abs=1e-10)

    def test_empty_interval(self):
        assert adaptive_quadrature(math.exp, 1.0, 1.0) == 0.0

    def test_real_complex_values_accepted(self):
        assert adaptive_quadrature(lambda x: complex(x, 0.0), 0.0, 2.0) == pytest.approx(2.0)

    def test_complex_integrand(self):
        with pytest.raises(IntegrandError):
            adaptive_quadrature(lambda x: cmath.sqrt(x - 1.0), 0.0, 2.0)

    def test_singular_integrand(self):
        with pytest.raises(IntegrandError):
            adaptive_quadrature(lambda x: 1.0 / (x - x), 0.0, 1.0)

    def test_divergent_integral(self):
        with pytest.raises(NonConvergenceError):
            adaptive_quadrature(lambda x: 1.0 / x, 0.0, 1.0)


class TestDerivative:
    """Richardson-extrapolated central differences."""

    def test_first_derivative(self):
        assert derivative(math.sin, 1.0) == pytest.approx(math.cos(1.0), abs=1e-10)

    def test_second_derivative(self):
        assert derivative(math.sin, 1.0, order=2) == pytest.approx(-math.sin(1.0), abs=1e-8)

    def test_unsupported_order(self):
        with pytest.raises(InvalidParameterError):
            derivative(math.sin, 1.0, order=3)

    def test_complex_sample(self):
        with pytest.raises(DomainError):
            derivative(cmath.sqrt, 0.0)

    @given(st.floats(-2.0, 2.0), st.floats(-1.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_exponential(self, k, z):
        expected = k * math.exp(k * z)
        assert derivative(lambda x: math.exp(k * x), z) == pytest.approx(expected, abs=1e-9 * max(1.0, abs(expected)))


class TestLocalStep:
    """Initial Ridders step near zeros of square-root amplitudes."""

    def test_shrinks_toward_a_branch_point(self):
        # |v| / |v'| = 2 z for sqrt
        assert local_step(math.sqrt, 0.01, 0.1) == pytest.approx(0.002, rel=1e-6)

    def test_keeps_the_default_away_from_zeros(self):
        assert local_step(math.exp, 0.0, 1.0) == 0.05

    def test_explicit_step_is_an_upper_bound(self):
        assert local_step(math.exp, 0.0, 1.0, step=0.01) == 0.01

    def test_floor(self):
        assert local_step(math.sqrt, 1e-6, 1e-3) == 1e-4

    def test_flat_function(self):
        assert local_step(lambda z: 3.0, 0.4, 3.0) == 0.05

    def test_unsampleable_neighbourhood_falls_back(self):
        assert local_step(math.sqrt, 0.0, 1.0) == 0.05


class TestResidualScan:
    """Residual reports along a candidate solution."""

    @staticmethod
    def _oscillator_residual(zeta, v, dv, d2v):
        return d2v + v

    def test_exact_solution_passes(self):
        report = residual_scan(
            lambda z: math.cos(z) + 2.0, lambda z, v, dv, d2v: d2v + v - 2.0,
            (0.0, 5.0), samples=51, tolerance=1e-8, case_id="cos",
        )
        assert report.passed
        assert report.samples == 51
        assert report.skipped_fraction == 0.0
        assert report.case_id == "cos"

    def test_amplitude_guard_skips_zeros(self):
        report = residual_scan(math.sin, self._oscillator_residual, (0.0, math.pi), samples=3, tolerance=1e-8)
        assert report.samples == 1
        assert report.skipped_fraction == pytest.approx(2.0 / 3.0)
        assert report.passed

    def test_wrong_solution_fails_and_locates_worst(self):
        report = residual_scan(np.exp, self._oscillator_residual, (0.0, 1.0), samples=11, tolerance=1e-8)
        assert not report.passed
        assert report.worst_at[0] == pytest.approx(1.0)
        assert report.max_residual == pytest.approx(2.0 * math.e, rel=1e-6)

    def test_everything_guarded(self):
        report = residual_scan(
            math.cos, self._oscillator_residual, (0.0, 1.0), samples=5,
            guard=lambda z, v: True,
        )
        assert not report.passed
        assert report.max_residual == math.inf
        assert report.notes == "all points skipped"

    def test_points_outside_the_real_domain_are_skipped(self):
        report = residual_scan(
            lambda z: cmath.sqrt(z), lambda z, v, dv, d2v: d2v + 0.25 * z ** -1.5,
            (-1.0, 1.0), samples=5, tolerance=1e-6,
        )
        assert report.samples == 2
        assert report.passed

    def test_square_root_near_its_branch_point(self):
        """A fixed 0.05 step would sample z < 0 at the left end."""
        report = residual_scan(
            math.sqrt, lambda z, v, dv, d2v: d2v + 0.25 * z ** -1.5,
            (0.06, 1.0), samples=48, tolerance=1e-5,
        )
        assert report.samples == 48
        assert report.skipped_fraction == 0.0
        assert report.passed, report.max_residual
