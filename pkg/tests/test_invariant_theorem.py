"""
Tests for the Ermakov invariant, the theta equation and the Milne
composition of the general dissipative solution.
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
from eplab.core.schemas import EPParams, ErmakovPairState, PhaseAccumulator, Sign
from eplab.modules.chiellini import amplitude_square
from eplab.modules.invariant_theorem import (
    compose_milne_solution,
    dissipation_balance,
    ermakov_invariant,
    factor_invariant,
    factorization_constant,
    gen_erm_residual,
    general_solution_u,
    invariant_is_c1_check,
    milne_phase,
    theta_of_phase,
    theta_square,
    wronskian_defect,
)
from eplab.modules.oracle import derivative, residual_scan
from eplab.modules.specfun import real_value


class TestErmakovInvariant:
    """I = -b (v/u)^2 - c (u/v)^2 + (u' v - u v')^2"""

    def test_value(self):
        state = ErmakovPairState(u=1.0, u_dot=0.0, v=1.0, v_dot=1.0, b=1.0, c=2.0)
        assert ermakov_invariant(state) == pytest.approx(-2.0)

    def test_singular(self):
        with pytest.raises(SingularityError):
            ermakov_invariant(ErmakovPairState(u=0.0, u_dot=1.0, v=1.0, v_dot=0.0, b=1.0, c=1.0))

    @given(
        st.floats(0.2, 3.0), st.floats(-2.0, 2.0), st.floats(0.2, 3.0), st.floats(-2.0, 2.0),
        st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(-1.0, 1.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_factor_form_is_exact(self, u, du, v, dv, b, c, log_gap):
        """The factorized form reproduces I whenever ratio0 exp(integral) = u/v."""
        ratio0 = (u / v) * math.exp(-log_gap)
        expected = ermakov_invariant(ErmakovPairState(u=u, u_dot=du, v=v, v_dot=dv, b=b, c=c))
        value = factor_invariant(u / v, v, du / u, dv / v, b, c, ratio0, log_gap)
        assert value == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_factorization_constant(self):
        assert factorization_constant(1.0, 2.0, 1.0, 2.0) == pytest.approx(9.0)

    def test_wronskian_defect(self):
        assert wronskian_defect(0.5, 2.0, 4.0) == pytest.approx(0.25)


class TestDissipationBalance:
    """I(zeta) - I(zeta_0) + 2 * integral of g W^2"""

    def test_undamped_constant_invariant(self):
        """u = v = sqrt(1 + zeta^2) with b = c = -1 keeps I = 2"""
        zetas = [0.1 * i for i in range(11)]
        states = [
            ErmakovPairState(
                u=math.sqrt(1 + z * z), u_dot=z / math.sqrt(1 + z * z),
                v=math.sqrt(1 + z * z), v_dot=z / math.sqrt(1 + z * z), b=-1.0, c=-1.0,
            )
            for z in zetas
        ]
        defects = dissipation_balance(states, zetas, [0.7] * len(zetas))
        assert defects[0] == 0.0
        assert max(abs(d) for d in defects) == pytest.approx(0.0, abs=1e-12)

    def test_source_term_accumulates(self):
        """Constant states with W = 1 and g = 1 accumulate 2 per unit zeta."""
        state = ErmakovPairState(u=1.0, u_dot=1.0, v=1.0, v_dot=0.0, b=0.0, c=0.0)
        defects = dissipation_balance([state] * 3, [0.0, 0.5, 1.0], [1.0, 1.0, 1.0])
        assert defects == pytest.approx([0.0, 1.0, 2.0])


class TestThetaEquation:
    """(theta theta_Theta)^2 = b + I theta^2 + c theta^4"""

    @pytest.mark.parametrize("I_bc,b,c,expected", [
        (1.0, 1.0, 1.0, -0.5),
        (2.0, 1.0, 0.0, -0.5),
        (3.0, 1.0, -1.0, 1.5),
    ])
    def test_value_at_zero_phase(self, I_bc, b, c, expected):
        assert theta_square(I_bc, b, c, 0.0) == pytest.approx(expected)

    def test_c_zero_needs_invariant(self):
        with pytest.raises(InvalidParameterError):
            theta_square(0.0, 1.0, 0.0, 0.3)

    @given(
        st.sampled_from([(1.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (-0.5, 2.0)]),
        st.floats(-1.5, 1.5),
        st.floats(-1.0, 1.0),
        st.sampled_from([Sign.PLUS, Sign.MINUS]),
    )
    @settings(max_examples=100, deadline=None)
    def test_separable_equation(self, c_b, I_bc, d_phase, sign):
        """T = theta^2 satisfies (T'/2)^2 = b + I T + c T^2"""
        c, b = c_b
        if c > 0:
            assume(4.0 * b * c - I_bc * I_bc > 0.1)
        if c == 0:
            assume(abs(I_bc) > 0.1)

        def square(x):
            return theta_square(I_bc, b, c, x, sign).real

        t = square(d_phase)
        slope = derivative(square, d_phase)
        expected = b + I_bc * t + c * t * t
        assert (slope / 2.0) ** 2 == pytest.approx(expected, abs=1e-8 * max(1.0, t * t))

    def test_theta_is_principal_root(self):
        assert theta_of_phase(1.0, 1.0, 1.0, 0.0) == pytest.approx(math.sqrt(0.5) * 1j)


class TestMilneComposition:
    """u = theta(Theta - Theta0) v_gamma"""

    def test_milne_phase_of_constant_amplitude(self):
        assert milne_phase(lambda z: 2.0, PhaseAccumulator(), 1.0) == pytest.approx(0.25)

    def test_milne_phase_start_point(self):
        acc = PhaseAccumulator(zeta_start=1.0)
        assert milne_phase(lambda z: 1.0, acc, 3.0) == pytest.approx(2.0)

    def test_compose_with_constant_amplitude(self):
        acc = PhaseAccumulator(theta0=0.1)
        u = compose_milne_solution(lambda z: 1.0, 3.0, 1.0, -1.0, Sign.PLUS, acc)
        assert u(0.5) == pytest.approx(theta_of_phase(3.0, 1.0, -1.0, 0.4))

    def test_general_solution_keeps_invariant(self):
        """The composed u and v_gamma form a pair with invariant I_bc"""
        p = EPParams(lambda2=0.25, c=1.0, c1=1.0)
        acc = PhaseAccumulator(theta0=-0.5, tolerance=1e-12)
        u_complex = general_solution_u(1.0, p, 1.0, 1.0, Sign.MINUS, acc)

        def u(z):
            return real_value(u_complex(z), z)

        w_of = amplitude_square(p)
        for zeta in (0.2, 0.5):
            w, dw = w_of(zeta)
            v = math.sqrt(w.real)
            state = ErmakovPairState(
                u=u(zeta), u_dot=derivative(u, zeta, 1, step=0.01),
                v=v, v_dot=dw.real / (2.0 * v), b=1.0, c=1.0,
            )
            assert ermakov_invariant(state) == pytest.approx(1.0, abs=1e-6)

    def test_undamped_pair_residual(self):
        u = lambda z: math.sqrt(1.0 + z * z)
        report = residual_scan(u, gen_erm_residual(lambda z: 0.0, 0.0, -1.0), (0.0, 2.0),
                               samples=21, tolerance=1e-8)
        assert report.passed, report.line()


class TestInvariantIsC1:
    """Recomputing the invariant along the Milne phase."""

    def test_oscillatory_amplitude(self):
        p = EPParams(lambda2=0.25, c=1.0, c1=1.0)
        report = invariant_is_c1_check(p, b=1.0, gamma=1.0, I_bc=1.0, sign=Sign.MINUS, theta0=-0.5)
        assert report.passed, report.line()

    def test_zero_branch(self):
        p = EPParams(lambda2=0.0, c=-1.0, c1=1.0)
        report = invariant_is_c1_check(p, b=1.0, gamma=1.0, I_bc=3.0, sign=Sign.PLUS, window=(0.0, 1.0))
        assert report.passed, report.line()

    def test_scaled_theta_breaks_invariant(self):
        p = EPParams(lambda2=0.25, c=1.0, c1=1.0)
        report = invariant_is_c1_check(
            p, b=1.0, gamma=1.0, I_bc=1.0, sign=Sign.MINUS, theta0=-0.5, theta_scale=1.001,
        )
        assert not report.passed
        assert report.max_residual > 1e-6
