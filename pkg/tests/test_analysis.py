"""Tests for orbit comparison, convergence studies, sweeps, and exports."""

from __future__ import annotations

import functools
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from robertson.analysis import (
    ComparisonReport,
    ConvergenceStudy,
    GENUINE_TRUNCATION,
    RegimeOrigin,
    StudyPoint,
    SweepRow,
    _simplify,
    compare,
    convergence_study,
    directed_hausdorff,
    hausdorff,
    integrate_genuine,
    report_to_json,
    sweep,
    timeseries_export,
    write_study_csv,
    write_sweep_csv,
)
from robertson.model import CLASSICAL_RATES, ScaledParams, reduced_jacobian, reduced_rhs
from robertson.param_geometry import Regime
from robertson.stiff_solver import SolverSettings, integrate

CLASSICAL = ScaledParams(eps1=1.3333e-9, eps2=3.3333e-4, c=1.0)

st_step = st.floats(min_value=-1.0, max_value=1.0)
st_walk = st.lists(st.tuples(st_step, st_step), min_size=2, max_size=25)
st_shift = st.floats(min_value=1e-6, max_value=10.0)
st_point = st.tuples(st_step, st_step)


def walk_to_polyline(steps: list[tuple[float, float]]) -> np.ndarray:
    return np.cumsum(np.asarray(steps, dtype=float), axis=0)


def dense_directed(a: np.ndarray, b: np.ndarray, n: int) -> tuple[float, float]:
    """Brute-force directed distance by resampling ``a``; returns (value, spacing)."""
    gaps = np.linalg.norm(np.diff(a, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(gaps)])
    stations = np.linspace(0.0, cum[-1], n)
    pts = np.column_stack([np.interp(stations, cum, a[:, k]) for k in range(a.shape[1])])
    worst = max(directed_hausdorff(pts[i : i + 1], b) for i in range(0, n, max(n // 512, 1)))
    # Exact per-point distances, not the BnB, for the bulk of the samples.
    from robertson.analysis import _segment_distance_matrix

    worst = float(_segment_distance_matrix(b)(pts).min(axis=1).max())
    return worst, cum[-1] / (n - 1)


class TestDirectedHausdorff:
    def test_translated_unit_segment(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert directed_hausdorff(a, a + [0.0, 0.25]) == pytest.approx(0.25, rel=1e-9)

    def test_v_shape_against_chord_is_segment_aware(self):
        v = np.array([[0.0, 0.0], [0.5, 0.4], [1.0, 0.0]])
        chord = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert directed_hausdorff(v, chord) == pytest.approx(0.4, rel=1e-9)
        # The chord's far point is its midpoint; its distance goes to the
        # nearest V edge, not a V vertex, so the sup is strictly below 0.4.
        exact = 0.2 / math.hypot(0.5, 0.4)
        assert directed_hausdorff(chord, v) == pytest.approx(exact, rel=1e-9)

    def test_single_points(self):
        a = np.array([[3.0, 4.0]])
        b = np.array([[0.0, 0.0]])
        assert directed_hausdorff(a, b) == pytest.approx(5.0)

    def test_near_parallel_offset_certifies_quickly(self):
        t = np.linspace(0.0, 1.0, 1500)
        a = np.column_stack([t, 0.5 * np.sin(2.0 * t)])
        d = hausdorff(a, a + [0.0, 1e-6])
        assert d == pytest.approx(1e-6, abs=1e-11)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            directed_hausdorff(np.zeros((2, 2)), np.zeros((2, 3)))

    def test_empty_and_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            directed_hausdorff(np.zeros((0, 2)), np.zeros((2, 2)))
        with pytest.raises(ValueError, match="finite"):
            directed_hausdorff(np.array([[np.nan, 0.0]]), np.zeros((2, 2)))

    @given(st_walk)
    def test_identical_polylines_are_at_zero_distance(self, steps):
        a = walk_to_polyline(steps)
        assert directed_hausdorff(a, a) == 0.0

    @given(st_walk, st_shift)
    def test_translation_by_known_offset(self, steps, shift):
        a = walk_to_polyline(steps)
        d = hausdorff(a, a + [0.0, shift])
        # Translating perpendicular never increases the gap beyond the
        # shift, and endpoints realize at least a fraction of it.
        assert d <= shift * (1.0 + 1e-9) + 1e-12
        assert d > 0.0

    @given(st_walk, st_walk)
    def test_symmetry(self, steps_a, steps_b):
        a, b = walk_to_polyline(steps_a), walk_to_polyline(steps_b)
        assert hausdorff(a, b) == hausdorff(b, a)

    @given(st_walk, st_walk, st_walk)
    def test_triangle_inequality(self, sa, sb, sc):
        a, b, c = (walk_to_polyline(s) for s in (sa, sb, sc))
        ac = hausdorff(a, c)
        ab = hausdorff(a, b)
        bc = hausdorff(b, c)
        assert ac <= (ab + bc) * (1.0 + 1e-8) + 1e-9

    @given(st_walk, st_walk)
    def test_agrees_with_dense_sampling(self, steps_a, steps_b):
        a, b = walk_to_polyline(steps_a), walk_to_polyline(steps_b)
        fast = directed_hausdorff(a, b)
        slow, spacing = dense_directed(a, b, 2000)
        # The certified value can only exceed a subsample's sup, and only
        # by what hides between samples.
        assert fast >= slow - 1e-9 * slow - 1e-12
        assert fast <= slow + 0.5 * spacing + 1e-12

    def test_dense_oracle_at_high_resolution(self):
        rng = np.random.default_rng(11)
        for _ in range(3):
            a = np.cumsum(rng.normal(size=(40, 2)) * 0.1, axis=0)
            b = np.cumsum(rng.normal(size=(30, 2)) * 0.1, axis=0)
            fast = directed_hausdorff(a, b)
            slow, spacing = dense_directed(a, b, 100_000)
            assert abs(fast - slow) <= max(1e-6, 0.5 * spacing)


st_tol = st.floats(min_value=1e-6, max_value=0.5)


class TestSimplify:
    @given(st_walk, st_tol)
    def test_deviation_bound_holds(self, steps, tol):
        pts = walk_to_polyline(steps)
        kept = _simplify(pts, tol)
        assert directed_hausdorff(pts, kept) <= tol * (1.0 + 1e-9) + 1e-12
        assert np.array_equal(kept[0], pts[0]) and np.array_equal(kept[-1], pts[-1])

    def test_sharp_corner_is_never_cut(self):
        dense = np.vstack(
            [
                np.column_stack([np.linspace(0.0, 1.0, 500), np.zeros(500)]),
                np.column_stack([np.ones(499), np.linspace(0.0, 1.0, 500)[1:]]),
            ]
        )
        kept = _simplify(dense, 1e-6)
        assert len(kept) == 3
        assert any(np.allclose(p, [1.0, 0.0], atol=1e-15) for p in kept)

    def test_short_inputs_pass_through(self):
        two = np.array([[0.0, 0.0], [1.0, 1.0]])
        assert _simplify(two, 0.1) is two


@functools.lru_cache(maxsize=None)
def classical_report() -> ComparisonReport:
    return compare(CLASSICAL)


@functools.lru_cache(maxsize=None)
def rates_report() -> ComparisonReport:
    return compare(CLASSICAL_RATES)


class TestCompare:
    def test_classical_point_is_mixed_quadratic_regime(self):
        assert classical_report().regime is Regime.B2

    def test_classical_y_max_matches_prediction(self):
        report = classical_report()
        assert report.y_max_predicted == pytest.approx(math.sqrt(1.3333e-9), rel=1e-12)
        assert report.rel_gap < 0.01
        assert report.y_max_numeric == pytest.approx(3.6515e-5, rel=0.01)

    def test_classical_orbit_closeness(self):
        report = classical_report()
        assert 0.0 < report.hausdorff_chart < 5e-3
        assert 0.0 < report.hausdorff_original < 1e-4

    def test_report_carries_solver_and_geometry_metadata(self):
        report = classical_report()
        assert report.solver_stats.steps > 0
        assert report.singular_length > 0.0 and report.genuine_length > 0.0
        assert set(report.chart_params) == {"r", "eps2_tilde"}
        assert report.tolerances["truncation"] == GENUINE_TRUNCATION

    def test_rate_constants_are_reduced_and_recorded(self):
        report = rates_report()
        assert report.rates == CLASSICAL_RATES
        assert report.regime is Regime.B2
        assert report.y_max_numeric == pytest.approx(3.6515e-5, rel=0.01)

    def test_deterministic(self):
        a = compare(ScaledParams(eps1=1e-4, eps2=1e-2, c=1.0))
        b = compare(ScaledParams(eps1=1e-4, eps2=1e-2, c=1.0))
        assert a.hausdorff_chart == b.hausdorff_chart
        assert a.hausdorff_original == b.hausdorff_original
        assert a.y_max_numeric == b.y_max_numeric

    def test_origin_raises_its_own_error(self):
        with pytest.raises(RegimeOrigin):
            compare(ScaledParams(eps1=0.0, eps2=0.0, c=1.0))

    def test_boundary_and_outside_points_rejected(self):
        with pytest.raises(ValueError, match="interior"):
            compare(ScaledParams(eps1=0.1, eps2=2.0, c=1.0))

    def test_degenerate_axis_rejected(self):
        with pytest.raises(ValueError, match="eps1 > 0"):
            compare(ScaledParams(eps1=0.0, eps2=1e-3, c=1.0))

    def test_mismatched_prebuilt_orbit_rejected(self):
        from robertson.singular_orbits import gamma0_B2

        orbit = gamma0_B2(1.0, 1.0, 64)
        b3_point = ScaledParams(eps1=5e-8, eps2=1e-2, c=1.0)
        with pytest.raises(ValueError, match="regime"):
            compare(b3_point, orbit=orbit)

    def test_report_rejects_negative_distances(self):
        report = classical_report()
        with pytest.raises(ValueError, match="non-negative"):
            ComparisonReport(
                params=report.params,
                rates=None,
                regime=report.regime,
                chart_params=report.chart_params,
                y_max_numeric=1.0,
                y_max_predicted=1.0,
                rel_gap=0.0,
                hausdorff_chart=-1.0,
                hausdorff_original=0.0,
                singular_length=1.0,
                genuine_length=1.0,
                solver_stats=report.solver_stats,
                tolerances={},
            )


class TestReportJson:
    def test_schema_fields_present(self):
        payload = report_to_json(rates_report())
        assert set(payload) == {
            "params",
            "regime",
            "y_max",
            "hausdorff",
            "solver",
            "status",
            "chart_params",
            "orbit_lengths",
            "tolerances",
        }
        assert set(payload["params"]) == {"k1", "k2", "k3", "eps1", "eps2", "c"}
        assert set(payload["y_max"]) == {"numeric", "predicted", "rel_gap"}
        assert set(payload["hausdorff"]) == {"chart", "original"}
        assert set(payload["solver"]) == {"steps", "rejected", "scheme"}

    def test_round_trips_through_json(self):
        payload = report_to_json(rates_report())
        assert json.loads(json.dumps(payload)) == payload

    def test_rates_recorded_or_null(self):
        with_rates = report_to_json(rates_report())
        assert with_rates["params"]["k1"] == pytest.approx(0.04)
        without = report_to_json(classical_report())
        assert without["params"]["k1"] is None
        assert without["params"]["eps1"] == pytest.approx(1.3333e-9)

    def test_status_ok(self):
        assert report_to_json(classical_report())["status"] == "ok"


class TestGenuineOrbit:
    def test_starts_at_rest_and_reaches_equilibrium(self):
        genuine = integrate_genuine(ScaledParams(eps1=1e-4, eps2=1e-2, c=1.0))
        assert genuine.regime is Regime.B2
        assert np.allclose(genuine.chart_points[0], [0.0, 0.0])
        assert np.linalg.norm(genuine.chart_points[-1] - [0.0, 1.0]) < 1e-5
        assert genuine.y_max > 0.0

    def test_original_points_scale_back(self):
        genuine = integrate_genuine(ScaledParams(eps1=1e-4, eps2=1e-2, c=1.0))
        ratio = genuine.original_points[:, 0] / np.where(
            genuine.chart_points[:, 0] == 0.0, 1.0, genuine.chart_points[:, 0]
        )
        nonzero = genuine.chart_points[:, 0] != 0.0
        assert np.allclose(ratio[nonzero], 1e-2)

    def test_origin_raises(self):
        with pytest.raises(RegimeOrigin):
            integrate_genuine(ScaledParams(eps1=0.0, eps2=0.0, c=1.0))

    def test_bad_truncation_rejected(self):
        with pytest.raises(ValueError, match="truncation"):
            integrate_genuine(CLASSICAL, truncation=0.0)


@functools.lru_cache(maxsize=None)
def b2_study() -> ConvergenceStudy:
    return convergence_study("B2", 1.0, (1e-2, 3e-3, 1e-3))


class TestConvergenceStudy:
    def test_first_order_decay(self):
        study = b2_study()
        assert study.passes
        assert study.monotone
        assert study.slope is not None and 0.8 <= study.slope <= 1.3

    def test_points_clean_and_decreasing(self):
        study = b2_study()
        assert all(p.error == "" for p in study.points)
        charts = [p.hausdorff_chart for p in study.points]
        originals = [p.hausdorff_original for p in study.points]
        assert all(a > b for a, b in zip(charts, charts[1:]))
        assert all(a > b for a, b in zip(originals, originals[1:]))

    def test_path_respects_requested_regime(self):
        from robertson.param_geometry import classify

        for p in b2_study().points:
            assert classify(p.eps1, p.eps2) is Regime.B2

    def test_needs_three_decreasing_radii(self):
        with pytest.raises(ValueError, match="at least 3"):
            convergence_study("B2", 1.0, (1e-2, 1e-3))
        with pytest.raises(ValueError, match="decreasing"):
            convergence_study("B2", 1.0, (1e-3, 1e-2, 1e-4))
        with pytest.raises(ValueError, match="positive"):
            convergence_study("B2", 1.0, (1e-2, 1e-3, -1e-4))

    def test_rejects_bad_fixed_coordinate(self):
        with pytest.raises(ValueError, match="fixed chart coordinate"):
            convergence_study("B2", -1.0, (1e-2, 3e-3, 1e-3))

    def test_rejects_path_leaving_the_regime(self):
        # A tiny rescaled eps2 pushes the quadratic-regime path into the
        # mixed region, which the classifier catches up front.
        with pytest.raises(ValueError, match="classifies as"):
            convergence_study("B2", 0.01, (1e-2, 3e-3, 1e-3))

    def test_rejects_non_interior_regime(self):
        with pytest.raises(ValueError, match="interior"):
            convergence_study(Regime.ORIGIN, 1.0, (1e-2, 3e-3, 1e-3))
        with pytest.raises(ValueError):
            convergence_study("no-such-regime", 1.0, (1e-2, 3e-3, 1e-3))

    def test_study_csv_layout(self):
        buffer = io.StringIO()
        write_study_csv(b2_study(), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "r,eps1,eps2,hausdorff_chart,hausdorff_original,error"
        assert len(lines) == 1 + len(b2_study().points)
        first = lines[1].split(",")
        assert float(first[0]) == 1e-2
        assert float(first[3]) == b2_study().points[0].hausdorff_chart

    def test_study_csv_records_failures(self):
        study = ConvergenceStudy(
            regime=Regime.B2,
            fixed_coord=1.0,
            c=1.0,
            points=(
                StudyPoint(1e-2, 1e-4, 1e-2, 3e-2, 3e-3),
                StudyPoint(1e-3, 1e-6, 1e-3, None, None, "SolverFailure: solver gave up"),
            ),
            slope=None,
            slope_band=None,
            monotone=False,
            passes=False,
        )
        buffer = io.StringIO()
        write_study_csv(study, buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[2].endswith("SolverFailure: solver gave up")
        assert ",,," in lines[2] or ",," in lines[2]

    def test_csv_deterministic(self):
        one, two = io.StringIO(), io.StringIO()
        write_study_csv(b2_study(), one)
        write_study_csv(b2_study(), two)
        assert one.getvalue() == two.getvalue()


@functools.lru_cache(maxsize=None)
def corner_sweep() -> tuple[SweepRow, ...]:
    return sweep((0.0, 1.3333e-9), (0.0, 3.3333e-4))


class TestSweep:
    def test_rows_in_grid_order(self):
        rows = corner_sweep()
        assert [(row.eps1, row.eps2) for row in rows] == [
            (0.0, 0.0),
            (0.0, 3.3333e-4),
            (1.3333e-9, 0.0),
            (1.3333e-9, 3.3333e-4),
        ]

    def test_origin_row_reports_no_dynamics_without_crashing(self):
        origin = corner_sweep()[0]
        assert origin.regime == Regime.ORIGIN.value
        assert origin.ymax_num is None and origin.t_half is None
        assert "origin" in origin.error

    def test_degenerate_axis_row_notes_missing_events(self):
        frozen = corner_sweep()[1]  # eps1 = 0: y never leaves zero
        assert frozen.t_half is None
        assert "no half-conversion" in frozen.error or "maximum" in frozen.error

    def test_classical_row_matches_prediction(self):
        classical = corner_sweep()[3]
        assert classical.error == ""
        assert classical.regime == Regime.B2.value
        assert classical.rel_gap is not None and classical.rel_gap < 0.05
        assert classical.ymax_num == pytest.approx(3.6515e-5, rel=0.01)
        assert classical.t_half is not None and classical.t_half > 0.0

    def test_sweep_csv_layout(self):
        buffer = io.StringIO()
        write_sweep_csv(corner_sweep(), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "eps1,eps2,regime,ymax_num,ymax_pred,rel_gap,t_half,error"
        assert len(lines) == 5
        classical = lines[4].split(",")
        assert float(classical[3]) == corner_sweep()[3].ymax_num

    def test_sweep_csv_deterministic(self):
        one, two = io.StringIO(), io.StringIO()
        write_sweep_csv(corner_sweep(), one)
        write_sweep_csv(corner_sweep(), two)
        assert one.getvalue() == two.getvalue()


@functools.lru_cache(maxsize=None)
def mild_trajectory():
    params = ScaledParams(eps1=1e-4, eps2=1e-2, c=1.0)
    rhs = lambda state: reduced_rhs(state, params)  # noqa: E731
    jac = lambda state: reduced_jacobian(state, params)  # noqa: E731
    return integrate(rhs, jac, (0.0, 0.0), (0.0, 1e4), SolverSettings())


class TestTimeseriesExport:
    def test_geometric_grid_shape(self):
        table = timeseries_export(mild_trajectory())
        t = table[:, 0]
        assert table.shape[1] == 3
        assert t[-1] == mild_trajectory().t_end
        assert np.all(np.diff(t) > 0.0)
        decades = math.log10(t[-1] / t[0])
        assert len(t) == max(int(round(64 * decades)) + 1, 2)

    def test_grid_is_geometric(self):
        t = timeseries_export(mild_trajectory())[:, 0]
        ratios = t[1:] / t[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-9)

    def test_planar_csv_header_and_rows(self):
        buffer = io.StringIO()
        table = timeseries_export(mild_trajectory(), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "t,y,z"
        assert len(lines) == len(table) + 1
        assert float(lines[1].split(",")[0]) == table[0, 0]

    def test_density_is_configurable(self):
        coarse = timeseries_export(mild_trajectory(), points_per_decade=8)
        fine = timeseries_export(mild_trajectory(), points_per_decade=64)
        assert len(fine) > len(coarse) >= 2

    def test_rejects_nonpositive_density(self):
        with pytest.raises(ValueError, match="points_per_decade"):
            timeseries_export(mild_trajectory(), points_per_decade=0)
