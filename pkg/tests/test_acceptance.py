"""End-to-end acceptance checks, one test per headline guarantee.

Each test exercises one user-facing promise of the package: classical-run
accuracy, chart transcription fidelity, trapping-region invariance,
convergence of the singular approximation, classifier consistency, and the
qualitative ordering across parameter regimes.  Wall-clock budgets are
asserted where a guarantee includes one.
"""

from __future__ import annotations

import functools
import math
import time

import numpy as np
import pytest

from robertson.analysis import convergence_study, sweep
from robertson.blowup_charts import (
    ChartPoint,
    chart_b2,
    chart_K11_1,
    chart_K11_2,
    chart_K11_3,
    chart_K12_2,
    chart_K12_3,
    chart_K3_2,
    chart_K3_3,
    field_K11_1,
    field_K12_3,
    field_K3_3,
    landmark_Pa,
    landmark_Pr,
    landmark_Q2,
    numerical_jacobian,
    omega_boundary_flux,
    pushforward_check,
    sphere_field_K11_1,
    sphere_jacobian_K11_1,
    sphere_jacobian_K11_2,
)
from robertson.model import (
    CLASSICAL_INITIAL,
    CLASSICAL_RATES,
    RateConstants,
    ScaledParams,
    full_jacobian,
    full_rhs,
    reduced_jacobian,
    reduced_rhs,
)
from robertson.param_geometry import Regime, RegimeConfig, classify
from robertson.stiff_solver import SolverSettings, find_y_max, integrate

CLASSICAL_SCALED = ScaledParams(eps1=1.3333e-9, eps2=3.3333e-4, c=1.0)


@functools.lru_cache(maxsize=1)
def _classical_full_run():
    """Classical full-system run to t = 1e6 at default settings, with timing."""
    start = time.perf_counter()
    trajectory = integrate(
        lambda y: full_rhs(y, CLASSICAL_RATES),
        lambda y: full_jacobian(y, CLASSICAL_RATES),
        CLASSICAL_INITIAL,
        (0.0, 1e6),
    )
    return trajectory, time.perf_counter() - start


def test_01_reduced_classical_y_max_within_one_percent():
    """The reduced classical run peaks at sqrt(eps1*c) to within 1%, in < 5 s."""
    start = time.perf_counter()
    trajectory = integrate(
        lambda y: reduced_rhs(y, CLASSICAL_SCALED),
        lambda y: reduced_jacobian(y, CLASSICAL_SCALED),
        (0.0, 0.0),
        (0.0, 2e5),
    )
    elapsed = time.perf_counter() - start
    t_peak, state = find_y_max(trajectory)
    predicted = math.sqrt(CLASSICAL_SCALED.eps1 * CLASSICAL_SCALED.c)
    assert predicted == pytest.approx(3.6515e-5, rel=1e-4)
    assert state[0] == pytest.approx(predicted, rel=1e-2)
    assert 0.0 < t_peak < trajectory.t_end
    assert elapsed < 5.0


def test_02_full_classical_conserves_total_mass():
    """x+y+z stays within 1e-9 of 1 at every accepted step up to t = 1e6, in < 5 s."""
    trajectory, elapsed = _classical_full_run()
    drift = np.max(np.abs(trajectory.states.sum(axis=1) - 1.0))
    assert drift <= 1e-9
    assert elapsed < 5.0


def test_03_full_classical_terminal_state_near_equilibrium():
    """The classical state at t = 1e6 lies within 1e-3 of the rest point (0, 0, 1)."""
    # The x component decays only algebraically (x ~ 1/(1 + k2*(k1/k3)^2 * t),
    # about 2e-3 at t = 1e6), so this bound probes the far tail of the run.
    trajectory, _ = _classical_full_run()
    gap = np.max(np.abs(np.asarray(trajectory.y_end) - np.array([0.0, 0.0, 1.0])))
    assert gap <= 1e-3


def test_04_pushforward_agreement_across_all_charts():
    """Hand-coded chart fields match the transported base field on 100 random
    interior points in every chart, to relative error 1e-8, in < 10 s total."""
    c = 1.3
    charts = [
        chart_b2(1e-3, 0.7, c),
        chart_K11_1(0.6, c),
        chart_K11_2(0.6, c),
        chart_K11_3(0.6, c),
        chart_K12_2(0.4, c),
        chart_K12_3(0.4, c),
        chart_K3_2(0.3, c),
        chart_K3_3(0.3, c),
    ]
    start = time.perf_counter()
    for index, chart in enumerate(charts):
        rng = np.random.default_rng(100 + index)
        for _ in range(100):
            if index == 0:  # planar rescaling chart
                point = rng.uniform([0.05, 0.0], [2.0, 2.0])
            else:
                last = (0.3, 0.9) if index in (3, 5) else (0.3, 1.2)
                point = np.array(
                    [rng.uniform(-1.5, 1.5), rng.uniform(0.1, 1.5), rng.uniform(*last)]
                )
            assert pushforward_check(chart, chart.base_field, point) <= 1e-8
    assert time.perf_counter() - start < 10.0


def test_05_equilibrium_eigenvalues_match_closed_forms():
    """Spectra at Pa, Pr, and Q2 equal (-2, 0), (1, 2), (-1-eps21*c, 0) to 1e-12."""
    c = 1.0
    for eps21 in (0.0, 0.5, 1.0):
        cases = (
            (landmark_Pa(), sphere_jacobian_K11_1, (-2.0, 0.0)),
            (landmark_Pr(), sphere_jacobian_K11_1, (1.0, 2.0)),
            (landmark_Q2(), sphere_jacobian_K11_2, (-1.0 - eps21 * c, 0.0)),
        )
        for landmark, jacobian, expected in cases:
            matrix = jacobian(np.asarray(landmark.coords[:2]), eps21, c)
            values = np.sort(np.linalg.eigvals(matrix).real)
            assert np.allclose(values, np.sort(expected), rtol=0.0, atol=1e-12)


def test_06_attracting_manifold_slope_matches_closed_form():
    """A fitted quadratic through the attracting-branch orbit recovers the
    slope -(1/2 + eps21*c) at Pa to 1e-3."""
    c = 1.0
    for eps21 in (0.0, 1.0):
        trajectory = integrate(
            lambda y: sphere_field_K11_1(y, eps21, c),
            lambda y: sphere_jacobian_K11_1(y, eps21, c),
            (-1.0, 1e-3),
            (0.0, 1950.0),
            SolverSettings(rel_tol=1e-10, abs_tol=1e-14),
        )
        samples = trajectory.sample_many(np.linspace(1000.0, 1900.0, 400))
        coeffs = np.polynomial.polynomial.polyfit(samples[:, 1], samples[:, 0], 2)
        assert coeffs[0] == pytest.approx(-1.0, abs=1e-5)
        assert coeffs[1] == pytest.approx(-(0.5 + eps21 * c), abs=1e-3)


def test_07_trapping_region_boundary_flux_nonpositive():
    """Outward flux through all three edges of the trapping region is never
    positive on a 200-point boundary sample, for eps21 across [0, beta1]; on
    the invariant-curve edge the flux equals -s1^2*eps21*c to 1e-12."""
    curve_s1 = np.linspace(0.0, 3.0, 67)
    boundary = (
        [ChartPoint("K11_1", (z1, 0.0)) for z1 in np.linspace(-3.0, 0.0, 67)]
        + [ChartPoint("K11_1", (-s1, s1)) for s1 in curve_s1]
        + [ChartPoint("K11_3", (0.0, s3)) for s3 in np.linspace(0.0, 3.0, 66)]
    )
    assert len(boundary) == 200
    c = 1.0
    for eps21 in np.linspace(0.0, RegimeConfig().beta1, 5):
        for point in boundary:
            assert omega_boundary_flux(point, eps21, c) <= 1e-12
        for s1 in curve_s1:
            flux = omega_boundary_flux(ChartPoint("K11_1", (-s1, s1)), eps21, c)
            assert flux == pytest.approx(-s1 * s1 * eps21 * c, abs=1e-12)


def test_08_hausdorff_distance_shrinks_linearly_in_each_regime():
    """Chart-space Hausdorff distance to the singular orbit decreases
    monotonically over r in {1e-2, 3e-3, 1e-3, 3e-4} with fitted log-log
    slope >= 0.8, within 60 s per regime."""
    radii = (1e-2, 3e-3, 1e-3, 3e-4)
    for regime, fixed_coord in (("B2", 1.0), ("B11", 0.5), ("B12", 0.5), ("B3", 5e-4)):
        start = time.perf_counter()
        study = convergence_study(regime, fixed_coord, radii)
        elapsed = time.perf_counter() - start
        assert all(not point.error for point in study.points), regime
        assert study.monotone, regime
        assert study.slope >= 0.8, (regime, study.slope)
        assert study.passes, regime
        assert elapsed < 60.0, (regime, elapsed)


def test_09_chart_orbits_conserve_their_invariants():
    """sigma1*s1, sigma3*s3, sigma3^2*eps13 stay constant to 1e-10 along three
    integrated orbits of their respective chart fields."""
    tight = SolverSettings(rel_tol=1e-11, abs_tol=1e-14)
    cases = (
        (
            lambda y: field_K11_1(y, 0.5, 1.0),
            lambda s: s[2] * s[1],
            ((-1.5, 0.2, 0.5), (-1.2, 0.4, 0.3), (-0.8, 0.1, 0.9)),
            4.0,
        ),
        (
            lambda y: field_K12_3(y, 0.4, 1.0),
            lambda s: s[2] * s[1],
            ((0.5, 0.8, 0.6), (1.2, 0.3, 0.2), (0.1, 1.0, 1.0)),
            5.0,
        ),
        (
            lambda y: field_K3_3(y, 0.3, 1.0),
            lambda s: s[1] ** 2 * s[2],
            ((0.5, 0.5, 0.8), (1.0, 0.2, 0.5), (0.2, 1.0, 1.5)),
            5.0,
        ),
    )
    for field, conserved, starts, horizon in cases:
        jacobian = lambda y: numerical_jacobian(field, y)  # noqa: E731
        for start in starts:
            trajectory = integrate(field, jacobian, np.array(start), (0.0, horizon), tight)
            values = np.array([conserved(state) for state in trajectory.states])
            assert np.max(np.abs(values - values[0])) <= 1e-10


def test_10_classifier_agrees_with_region_inequalities():
    """Each of 1e5 random disc points satisfies exactly one region's defining
    inequalities and classify returns that region; the outer parabola belongs
    to the closed middle regime."""
    cfg = RegimeConfig()
    rng = np.random.default_rng(20260823)
    eps2 = 10.0 ** rng.uniform(-8.0, 0.0, size=120_000)
    eps1 = 10.0 ** rng.uniform(-16.0, 0.0, size=120_000)
    inside = eps1 * eps1 + eps2 * eps2 <= cfg.delta * cfg.delta
    assert int(inside.sum()) >= 100_000
    eps1, eps2 = eps1[inside][:100_000], eps2[inside][:100_000]
    parabola = eps2 * eps2
    membership = np.vstack(
        [
            eps1 < cfg.beta3 * parabola,
            (cfg.beta3 * parabola <= eps1) & (eps1 <= cfg.beta2 * parabola),
            (eps1 > cfg.beta2 * parabola) & (eps1 > cfg.beta1 * eps2),
            (eps1 > cfg.beta2 * parabola) & (eps1 < cfg.beta1 * eps2),
            (eps1 > cfg.beta2 * parabola) & (eps1 == cfg.beta1 * eps2),
        ]
    )
    assert np.all(membership.sum(axis=0) == 1)
    labels = (Regime.B3, Regime.B2, Regime.B11, Regime.B12, Regime.ON_C1)
    expected = np.argmax(membership, axis=0)
    for index in range(eps1.size):
        assert classify(float(eps1[index]), float(eps2[index]), cfg) is labels[expected[index]]
    for eps2_value in np.geomspace(1e-6, 0.5, 50):
        assert classify(cfg.beta2 * eps2_value * eps2_value, eps2_value, cfg) is Regime.B2


def _rk4_reference(rhs, y0, t_end, h):
    """Fixed-step classical fourth-order explicit stepper (oracle)."""
    y = np.asarray(y0, dtype=float).copy()
    for _ in range(round(t_end / h)):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def test_11_mildly_stiff_run_matches_explicit_reference():
    """With k2 lowered to 1e3 the implicit solver agrees with a fixed-step
    explicit integration to 1e-6 over t in [0, 1]."""
    rates = RateConstants(k1=0.04, k2=1e3, k3=10.0)
    rhs = lambda y: full_rhs(y, rates)  # noqa: E731
    trajectory = integrate(
        rhs,
        lambda y: full_jacobian(y, rates),
        CLASSICAL_INITIAL,
        (0.0, 1.0),
        SolverSettings(rel_tol=1e-10, abs_tol=1e-14),
    )
    reference = _rk4_reference(rhs, CLASSICAL_INITIAL, 1.0, 1e-4)
    assert np.max(np.abs(trajectory.y_end - reference)) <= 1e-6


def test_12_regime_representatives_order_y_max_and_t_half():
    """Along a fixed-eps2 cut through all four regimes, y_max strictly falls
    and the half-conversion time strictly grows, absolutely and relative to
    the y-decay timescale 1/sqrt(eps1)."""
    eps2 = CLASSICAL_SCALED.eps2
    rows = [sweep([eps1], [eps2])[0] for eps1 in (1e-3, 3e-5, 3e-8, 1e-10)]
    assert tuple(row.regime for row in rows) == ("B11", "B12", "B2", "B3")
    assert all(not row.error for row in rows)
    peaks = [row.ymax_num for row in rows]
    assert all(a > b for a, b in zip(peaks, peaks[1:]))
    halves = [row.t_half for row in rows]
    assert all(a < b for a, b in zip(halves, halves[1:]))
    scaled = [row.t_half * math.sqrt(row.eps1) for row in rows]
    assert all(a < b for a, b in zip(scaled, scaled[1:]))
