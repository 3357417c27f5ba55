"""
Tests for the Abel correspondence, linear-term removal and the
factorization of the dissipative SEP operator.
"""

import math
import sys
from pathlib import Path

import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from eplab.core.errors import InvalidParameterError, SingularityError
from eplab.core.schemas import EPParams, Sign
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
from eplab.modules.chiellini import amplitude_square, general_solution_v, radicand
from eplab.modules.oracle import IVPProblem, derivative, integrate_ivp
from eplab.modules.specfun import real_value

ASCENDING = EPParams(lambda2=0.25, c=1.0, c1=1.0, sign=Sign.PLUS)


def _constant(value):
    return lambda u: value


def _closed_v(z):
    return real_value(general_solution_v(ASCENDING)(z), z)


class TestAbelCorrespondence:
    """u'' + f2 u' + f3 + f1 u'^2 + f0 u'^3 = 0 and dy/du = f0 + f1 y + f2 y^2 + f3 y^3"""

    COEFFS = GeneralODECoeffs(f0=_constant(1.0), f1=_constant(2.0), f2=_constant(3.0), f3=_constant(4.0))

    def test_abel_rhs(self):
        assert to_abel_rhs(self.COEFFS)(0.0, 0.5) == pytest.approx(3.25)

    def test_second_order_rhs(self):
        du, d2u = second_order_rhs(self.COEFFS)(0.0, [0.7, 2.0])
        assert du == 2.0
        assert d2u == pytest.approx(-26.0)

    def test_default_coefficients_vanish(self):
        assert to_abel_rhs(GeneralODECoeffs())(1.0, 2.0) == 0.0

    def test_generic_route_matches_direct_integration(self):
        coeffs = GeneralODECoeffs(f1=_constant(0.1), f2=_constant(0.3), f3=lambda u: u)
        direct = integrate_ivp(IVPProblem(rhs=second_order_rhs(coeffs), y0=(0.5, 1.0), span=(0.0, 0.5)))
        assert direct.completed
        u_end, du_end = direct(0.5)
        route = abel_route(coeffs, 0.5, 1.0, float(u_end))
        assert route.completed
        y_end, zeta_end = route.states[-1]
        assert zeta_end == pytest.approx(0.5, abs=1e-6)
        assert y_end == pytest.approx(1.0 / du_end, rel=1e-6)

    def test_chiellini_route_matches_closed_form(self):
        w, dw = amplitude_square(ASCENDING)(0.0)
        v0 = math.sqrt(w.real)
        route = abel_route(chiellini_coeffs(ASCENDING), v0, dw.real / (2.0 * v0), _closed_v(0.9))
        assert route.completed
        for v, (_, zeta) in route.nodes():
            zeta = min(max(float(zeta), 0.0), 0.9)
            assert _closed_v(zeta) == pytest.approx(v, abs=1e-6)

    def test_zero_slope_is_singular(self):
        with pytest.raises(SingularityError):
            abel_route(self.COEFFS, 0.0, 0.0, 1.0)


class TestLinearTermRemoval:
    """y_hat = y exp(-integral of f1)"""

    def test_exponent_of_constant_f1(self):
        removal = remove_linear_term(GeneralODECoeffs(f1=_constant(0.5), f2=_constant(2.0)))
        assert removal.exponent(1.0) == pytest.approx(math.exp(0.5))
        assert removal.coeffs.f2(1.0) == pytest.approx(2.0 * math.exp(0.5))
        assert removal.coeffs.f1(1.0) == 0.0

    def test_map_round_trip(self):
        removal = remove_linear_term(GeneralODECoeffs(f1=lambda u: 0.3 * u), u_ref=0.2)
        assert removal.exponent(0.2) == pytest.approx(1.0)
        assert removal.to_original(0.7, removal.to_transformed(0.7, 1.3)) == pytest.approx(1.3)

    def test_transformed_flow_maps_back(self):
        coeffs = GeneralODECoeffs(
            f0=lambda u: 0.1 - 0.2 * u, f1=lambda u: 0.4 + 0.3 * u,
            f2=lambda u: -0.2 + 0.1 * u, f3=lambda u: 0.25 * u,
        )
        removal = remove_linear_term(coeffs)

        def flow(c, start):
            rhs = to_abel_rhs(c)
            traj = integrate_ivp(IVPProblem(rhs=lambda u, y: (rhs(u, y[0]),), y0=(start,), span=(0.0, 0.5)))
            traj.raise_if_halted()
            return traj

        original = flow(coeffs, 0.5)
        transformed = flow(removal.coeffs, removal.to_transformed(0.0, 0.5))
        for u in (0.1, 0.3, 0.5):
            assert removal.to_original(u, transformed(u)[0]) == pytest.approx(original(u)[0], rel=1e-7)


class TestFactorization:
    """(D + Phi2)(D + Phi1 v) reproduces v'' + g v' + h at k = -2."""

    @given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.1, 3.0), st.floats(0.3, 2.5))
    @settings(max_examples=200, deadline=None)
    def test_identities(self, lambda2, c, c1, v):
        p = EPParams(lambda2=lambda2, c=c, c1=c1)
        assume(radicand(v, p) >= 0.05)
        d_h, d_g = factorization_identities(v, p)
        scale = max(1.0, abs(p.lambda2 * v + p.c / v ** 3), abs(phi_functions(v, p)[1]))
        assert max(abs(d_h), abs(d_g)) <= 1e-9 * scale

    @given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.1, 3.0), st.floats(0.5, 2.5))
    @settings(max_examples=100, deadline=None)
    def test_slope_matches_numerical_derivative(self, lambda2, c, c1, v):
        p = EPParams(lambda2=lambda2, c=c, c1=c1)
        assume(min(radicand(v + d, p) for d in (-0.06, -0.03, 0.0, 0.03, 0.06)) >= 0.1)
        exact = dphi1_dv(v, p)
        numeric = derivative(lambda x: phi_functions(x, p)[0], v)
        assert abs(numeric - exact) <= 1e-7 * max(1.0, abs(exact))

    def test_wrong_slope_is_detected(self):
        _, d_g = factorization_identities(1.0, ASCENDING, dphi1=dphi1_dv(1.0, ASCENDING) + 0.1)
        assert d_g == pytest.approx(0.1)

    def test_requires_k_minus_two(self):
        with pytest.raises(InvalidParameterError):
            phi_functions(1.0, EPParams(lambda2=0.25, k=-1.0))

    def test_first_factor_generates_ascending_solution(self):
        traj = first_factor_solution(ASCENDING, _closed_v(0.2), 0.9, zeta_start=0.2)
        assert traj.completed
        for zeta in (0.4, 0.7, 0.9):
            assert traj(zeta)[0] == pytest.approx(_closed_v(zeta), abs=1e-7)

    def test_first_factor_halts_at_turning_point(self):
        traj = first_factor_solution(ASCENDING, _closed_v(0.2), 2.0, zeta_start=0.2)
        assert traj.status in ("domain", "underflow")
        assert traj.reached < 1.2

    def test_custom_first_factor(self):
        """u' = u from u(0) = 1"""
        traj = first_factor_solution(ASCENDING, 1.0, 1.0, phi1=lambda u: 1.0)
        assert traj(1.0)[0] == pytest.approx(math.e, rel=1e-8)
