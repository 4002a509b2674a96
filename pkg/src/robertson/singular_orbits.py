"""Construction of the limiting singular orbits, one per parameter regime.

As both perturbation parameters go to zero along a regime path, the
rescaled planar orbits converge to a concatenation of three kinds of
pieces: fast fibres of the layer problem, slow arcs on attracting
critical manifolds, and -- where the critical manifold degenerates --
centre-flow arcs on the blow-up sphere.  This module assembles those
concatenations explicitly:

* :func:`gamma0_B2` -- fast fibre plus slow arc in the rescaled plane.
* :func:`gamma0_B11` -- the B2 picture with the product interaction
  switched off, continued across the sphere by integrating the centre
  flow from the attracting corner ``Pa`` to the terminal point ``Q2``.
* :func:`gamma0_family_B12` -- fibre and slow arcs tracked in the
  directional charts ``K12_3``/``K12_2`` for one member of the B12
  family of singular orbits.
* :func:`gamma0_family_B3` -- fibre and slow arcs in ``K3_2``/``K3_3``
  for one member of the B3 family.

Fast and slow pieces are sampled geometrically: the slow arcs are graphs
of explicit quadratic-root solutions of the layer equilibrium equations,
so every emitted vertex sits on the relevant manifold to rounding
accuracy.  Only the centre piece of :func:`gamma0_B11` requires
integration, because the sphere flow connecting ``Pa`` to ``Q2`` has no
closed form.  All segments are resampled to (approximately) equal chord
length with a small oversampling margin, so consecutive vertices are
never farther apart than ``length / n_points``.

Arcs that limit onto an equilibrium are truncated at distance 1e-8 from
it and closed with a single straight tail vertex at the exact
equilibrium, so orbit endpoints are exact while the sampled part stays
in the region where the defining formulas are well conditioned.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from typing import Callable, IO, Iterable, Mapping

import numpy as np

from .blowup_charts import (
    OMEGA_CHARTS,
    center_manifold_slope_K11,
    chart_K3_2,
    chart_K3_3,
    chart_K12_2,
    chart_K12_3,
    sphere_chart_convert,
    sphere_field_K11_1,
    sphere_field_K11_2,
    sphere_jacobian_K11_1,
    sphere_jacobian_K11_2,
)
from .param_geometry import ChartUndefined, Regime
from .stiff_solver import (
    SolverSettings,
    Trajectory,
    crossing_event,
    integrate,
    proximity_event,
)

__all__ = [
    "CenterTrackingFailed",
    "ReducedFlowStalled",
    "OrbitSegment",
    "SingularOrbit",
    "FAST",
    "SLOW",
    "CENTER",
    "gamma0_B2",
    "gamma0_B11",
    "gamma0_family_B12",
    "gamma0_family_B3",
    "y_max_prediction",
    "to_original_coords",
    "to_plane_coords",
    "junction_gaps",
    "write_orbit_csv",
    "write_original_csv",
]

#: Segment kinds.
FAST = "fast"
SLOW = "slow"
CENTER = "center"

#: Distance from an equilibrium at which slow/centre arcs are truncated
#: before the exact equilibrium is appended as a straight tail.
TERMINATION_RADIUS = 1e-8

#: Offset along the centre-manifold tangent used to seed the sphere flow
#: just off the attracting corner ``Pa``; the seed picks the unique
#: centre orbit entering the positive ``s1`` half.
SEED_OFFSET = 1e-6

_DEFAULT_N_POINTS = 2048
# Emitting ~2% more vertices than requested turns the "spacing roughly
# equal to length/n" of chord-length equidistribution into a strict
# "spacing <= length/n" with margin to spare.
_OVERSAMPLE = 1.02
_SPHERE_BAND = 1e-9

_TRACKING_SETTINGS = SolverSettings(rel_tol=1e-10, abs_tol=1e-14)
#: Tolerance for the a-posteriori check that the tracked centre orbit
#: stayed inside the trapping region (slack for integration error).
_OMEGA_SLACK = 1e-8


class CenterTrackingFailed(RuntimeError):
    """The integrated centre orbit left the trapping region or never
    reached its terminal point within the time budget."""


class ReducedFlowStalled(RuntimeError):
    """Progress of a reduced-flow continuation dropped below 1e-14 per
    step before the target was reached.

    The constructions in this module parametrise slow arcs by explicit
    graphs instead of integrating the reduced flow, so they cannot
    stall; the exception type is part of the public contract for
    alternative (integration-based) constructions.
    """


@dataclasses.dataclass(frozen=True)
class OrbitSegment:
    """One polyline piece of a singular orbit.

    ``kind`` is one of :data:`FAST`, :data:`SLOW`, :data:`CENTER`;
    ``chart`` names the coordinate frame of ``points`` (a base plane
    ``"b2"``/``"b11_base"`` with columns ``(y, z)``, or a directional
    chart with its three chart coordinates).  ``note`` records how the
    segment was entered, e.g. a chart handoff.
    """

    kind: str
    chart: str
    points: np.ndarray
    note: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (FAST, SLOW, CENTER):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 2:
            raise ValueError("segment needs a polyline of at least two points")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def chord_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    def length(self) -> float:
        return float(np.sum(self.chord_lengths()))


@dataclasses.dataclass(frozen=True)
class SingularOrbit:
    """An ordered concatenation of fast/slow/centre segments.

    ``params`` records the constructor inputs (always including ``"c"``
    and ``"n_points"``) so the orbit can be mapped back to original
    coordinates and re-built reproducibly.
    """

    segments: tuple[OrbitSegment, ...]
    regime: Regime
    params: Mapping[str, float]

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        if not segments:
            raise ValueError("an orbit needs at least one segment")
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "params", dict(self.params))

    def vertex_count(self) -> int:
        return sum(segment.points.shape[0] for segment in self.segments)


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------


def _station_count(n_points: int) -> int:
    return int(math.ceil(_OVERSAMPLE * n_points)) + 1


def _straight_points(start: Iterable[float], end: Iterable[float], n_points: int) -> np.ndarray:
    a = np.asarray(tuple(start), dtype=float)
    b = np.asarray(tuple(end), dtype=float)
    t = np.linspace(0.0, 1.0, _station_count(n_points))[:, None]
    points = a[None, :] * (1.0 - t) + b[None, :] * t
    points[0] = a
    points[-1] = b
    return points


def _equidistribute(
    parameters: np.ndarray,
    evaluate: Callable[[np.ndarray], np.ndarray],
    n_points: int,
) -> np.ndarray:
    """Sample ``evaluate`` at parameters re-spaced to equal chord length.

    ``parameters`` is a dense monotone grid of the curve parameter;
    ``evaluate`` maps a parameter array to an ``(m, k)`` point array.
    The returned polyline has exact first/last points and chords no
    longer than its total length divided by ``n_points``.
    """
    parameters = np.asarray(parameters, dtype=float)
    dense = evaluate(parameters)
    chords = np.linalg.norm(np.diff(dense, axis=0), axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(chords)))
    total = float(cumulative[-1])
    if total == 0.0:
        return np.vstack([dense[0], dense[-1]])
    stations = np.linspace(0.0, total, _station_count(n_points))
    where = np.interp(stations, cumulative, parameters)
    points = evaluate(where)
    points[0] = dense[0]
    points[-1] = dense[-1]
    return points


def _dense_grid(n_points: int) -> int:
    return max(8 * n_points, 4096) + 1


def _resample_trajectory(trajectory: Trajectory, n_points: int) -> np.ndarray:
    """Re-sample an integrated orbit at equal chord-length stations."""
    nodes = trajectory.states
    chords = np.linalg.norm(np.diff(nodes, axis=0), axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(chords)))
    total = float(cumulative[-1])
    if total == 0.0:
        return np.vstack([nodes[0], nodes[-1]])
    stations = np.linspace(0.0, total, _station_count(n_points))
    times = np.interp(stations, cumulative, trajectory.times)
    points = trajectory.sample_many(times)
    points[0] = nodes[0]
    points[-1] = nodes[-1]
    return points


def _with_column(points: np.ndarray, value: float) -> np.ndarray:
    column = np.full((points.shape[0], 1), float(value))
    return np.hstack([points, column])


def _bisect_decreasing(fn: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of a function that is positive at ``lo`` and negative at ``hi``."""
    f_lo = fn(lo)
    f_hi = fn(hi)
    if f_lo < 0.0 or f_hi > 0.0:
        raise ValueError("bisection bracket does not straddle the root")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fn(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# regime B2
# ---------------------------------------------------------------------------


def gamma0_B2(eps2: float, c: float, n_points: int = _DEFAULT_N_POINTS) -> SingularOrbit:
    """Singular orbit of the rescaled plane for the quadratic regime.

    ``eps2`` is the rescaled interaction coefficient (the regime keeps it
    within ``[1/sqrt(beta2), 1/sqrt(beta3)]``; any non-negative value
    yields a well-defined orbit).  The orbit is a fast fibre on the line
    ``z = 0`` from the origin to ``(sqrt(c), 0)`` followed by a slow arc
    on the attracting critical branch up to the equilibrium ``(0, c)``.
    """
    _validate_common(c, n_points)
    if not eps2 >= 0.0:
        raise ValueError(f"eps2 must be non-negative, got {eps2!r}")
    root = math.sqrt(c)
    fast = _straight_points((0.0, 0.0), (root, 0.0), n_points)

    def on_manifold(u: np.ndarray) -> np.ndarray:
        y = root - u
        z = (c - y * y) / (1.0 + eps2 * y)
        return np.column_stack([y, z])

    slow = _equidistribute(np.linspace(0.0, root, _dense_grid(n_points)), on_manifold, n_points)
    slow[-1] = (0.0, c)
    return SingularOrbit(
        segments=(
            OrbitSegment(FAST, "b2", fast),
            OrbitSegment(SLOW, "b2", slow),
        ),
        regime=Regime.B2,
        params={"eps2_tilde": float(eps2), "c": float(c), "n_points": n_points},
    )


# ---------------------------------------------------------------------------
# regime B11
# ---------------------------------------------------------------------------


def gamma0_B11(eps21: float, c: float, n_points: int = _DEFAULT_N_POINTS) -> SingularOrbit:
    """Singular orbit for the linear regime above the diagonal.

    The planar part is the ``eps2 = 0`` limit of :func:`gamma0_B2`; at
    the degenerate fold ``(0, c)`` the orbit continues on the blow-up
    sphere.  The centre piece is obtained by integrating the sphere flow
    of chart ``K11_1`` from a seed a distance :data:`SEED_OFFSET` along
    the centre-manifold tangent at ``Pa``, handing off to chart
    ``K11_2`` once ``s1`` reaches 1, and stopping within
    :data:`TERMINATION_RADIUS` of ``Q2``.  Raises
    :class:`CenterTrackingFailed` if the tracked orbit leaves the
    trapping region or never reaches ``Q2``.
    """
    _validate_common(c, n_points)
    if not eps21 >= 0.0:
        raise ValueError(f"eps21 must be non-negative, got {eps21!r}")
    root = math.sqrt(c)
    fast = _straight_points((0.0, 0.0), (root, 0.0), n_points)

    def on_parabola(u: np.ndarray) -> np.ndarray:
        y = root - u
        return np.column_stack([y, c - y * y])

    slow = _equidistribute(np.linspace(0.0, root, _dense_grid(n_points)), on_parabola, n_points)
    slow[-1] = (0.0, c)

    chart1, chart2 = _track_center_flow(eps21, c, n_points)
    return SingularOrbit(
        segments=(
            OrbitSegment(FAST, "b11_base", fast),
            OrbitSegment(SLOW, "b11_base", slow),
            OrbitSegment(CENTER, "K11_1", chart1, note="seeded 1e-6 along the centre tangent at Pa"),
            OrbitSegment(CENTER, "K11_2", chart2, note="handoff from K11_1 at s1 = 1"),
        ),
        regime=Regime.B11,
        params={"eps21": float(eps21), "c": float(c), "n_points": n_points},
    )


def _track_center_flow(eps21: float, c: float, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the sphere flow from near ``Pa`` to near ``Q2``.

    Returns the ``K11_1`` and ``K11_2`` polylines (three columns each,
    the last being the zero radial coordinate).
    """
    slope = center_manifold_slope_K11(eps21, c)
    seed = np.array([-1.0 + slope * SEED_OFFSET, SEED_OFFSET])

    first = integrate(
        lambda state: sphere_field_K11_1(state, eps21, c),
        lambda state: sphere_jacobian_K11_1(state, eps21, c),
        seed,
        (0.0, 1e9),
        _TRACKING_SETTINGS,
        events=[crossing_event(1, 1.0, direction=+1, terminal=True)],
    )
    if not first.events:
        raise CenterTrackingFailed(
            "centre orbit never reached the K11_1 -> K11_2 handoff at s1 = 1"
        )
    _require_inside_omega(first.states[:, 1] >= -_OMEGA_SLACK, "K11_1", "s1 >= 0")
    _require_inside_omega(
        first.states.sum(axis=1) <= _OMEGA_SLACK, "K11_1", "s1 + z1 <= 0"
    )

    z1_end, s1_end = first.y_end
    handoff = np.array([1.0 / s1_end, z1_end / (s1_end * s1_end)])
    second = integrate(
        lambda state: sphere_field_K11_2(state, eps21, c),
        lambda state: sphere_jacobian_K11_2(state, eps21, c),
        handoff,
        (0.0, 1e10),
        _TRACKING_SETTINGS,
        events=[proximity_event((0.0, 0.0), TERMINATION_RADIUS, terminal=True)],
    )
    if not second.events:
        raise CenterTrackingFailed(
            "centre orbit never reached the termination ball around Q2"
        )
    _require_inside_omega(second.states[:, 0] >= -_OMEGA_SLACK, "K11_2", "y2 >= 0")
    _require_inside_omega(
        second.states.sum(axis=1) <= _OMEGA_SLACK, "K11_2", "y2 + z2 <= 0"
    )

    chart1 = _with_column(_resample_trajectory(first, n_points), 0.0)
    chart2_plane = _resample_trajectory(second, n_points)
    chart2_plane = np.vstack([chart2_plane, (0.0, 0.0)])
    return chart1, _with_column(chart2_plane, 0.0)


def _require_inside_omega(condition: np.ndarray, chart: str, edge: str) -> None:
    if not bool(np.all(condition)):
        raise CenterTrackingFailed(
            f"centre orbit left the trapping region in chart {chart} ({edge} violated)"
        )


# ---------------------------------------------------------------------------
# regime B12
# ---------------------------------------------------------------------------


def gamma0_family_B12(
    eps2_tilde: float, c: float, n_points: int = _DEFAULT_N_POINTS
) -> SingularOrbit:
    """One member of the family of singular orbits below the diagonal.

    The orbit starts at the entry point ``O3 = (0, eps2_tilde/sqrt(c),
    sqrt(c))`` of chart ``K12_3``, runs along the fast fibre to the
    attracting branch of ``S3``, follows that branch (the product
    ``sigma3 * s3`` stays equal to ``eps2_tilde``) until the handoff to
    chart ``K12_2`` at ``sigma3 = eps2_tilde`` (``z2 = -1``), and
    continues on the attracting branch in ``K12_2`` until it is within
    :data:`TERMINATION_RADIUS` of the equilibrium line at
    ``(0, 0, eps2_tilde)``.
    """
    _validate_common(c, n_points)
    root = math.sqrt(c)
    if not 0.0 < eps2_tilde <= root:
        raise ValueError(
            f"eps2_tilde must lie in (0, sqrt(c)] for the fibre geometry, got {eps2_tilde!r}"
        )
    s3_fibre = eps2_tilde / root
    fast = _straight_points((0.0, s3_fibre, root), (1.0, s3_fibre, root), n_points)
    segments = [OrbitSegment(FAST, "K12_3", fast)]

    def branch_K3(sigma3: np.ndarray) -> np.ndarray:
        s3 = eps2_tilde / sigma3
        q = s3 * (c - sigma3 * sigma3)
        y3 = 0.5 * (-q + np.sqrt(q * q + 4.0))
        return np.column_stack([y3, s3, sigma3])

    if eps2_tilde < root:
        # sigma3 decreases from sqrt(c) to eps2_tilde; a log grid keeps the
        # dense sampling fine near the handoff even for small eps2_tilde.
        t_grid = np.linspace(0.0, math.log(root / eps2_tilde), _dense_grid(n_points))
        slow_K3 = _equidistribute(
            t_grid, lambda t: branch_K3(root * np.exp(-t)), n_points
        )
        slow_K3[0] = fast[-1]
        slow_K3[-1] = branch_K3(np.array([eps2_tilde]))[0]
        slow_K3[-1][1] = 1.0
        segments.append(OrbitSegment(SLOW, "K12_3", slow_K3))
        entry_note = "handoff from K12_3 at sigma3 = eps2_tilde (z2 = -1)"
    else:
        entry_note = "fibre ends on the chart boundary z2 = -1; no K12_3 slow arc"

    sigma2 = eps2_tilde

    def branch_K2_plane(z2: np.ndarray) -> np.ndarray:
        p = c + sigma2 * sigma2 * z2
        y2 = 0.5 * (-p + np.sqrt(p * p - 4.0 * z2))
        return np.column_stack([y2, z2])

    def radius_K2(z2: float) -> float:
        y2 = float(branch_K2_plane(np.array([z2]))[0, 0])
        return math.hypot(y2, z2) - TERMINATION_RADIUS

    z2_stop = _bisect_decreasing(radius_K2, -1.0, -1e-300)
    t_grid = np.linspace(0.0, math.log(1.0 / -z2_stop), _dense_grid(n_points))
    slow_K2_plane = _equidistribute(
        t_grid, lambda t: branch_K2_plane(-np.exp(-t)), n_points
    )
    slow_K2_plane = np.vstack([slow_K2_plane, (0.0, 0.0)])
    slow_K2 = _with_column(slow_K2_plane, sigma2)
    slow_K2[0, :2] = branch_K2_plane(np.array([-1.0]))[0]
    segments.append(OrbitSegment(SLOW, "K12_2", slow_K2, note=entry_note))

    return SingularOrbit(
        segments=tuple(segments),
        regime=Regime.B12,
        params={"eps2_tilde": float(eps2_tilde), "c": float(c), "n_points": n_points},
    )


# ---------------------------------------------------------------------------
# regime B3
# ---------------------------------------------------------------------------


def gamma0_family_B3(
    eps1_tilde: float, c: float, n_points: int = _DEFAULT_N_POINTS
) -> SingularOrbit:
    """One member of the family of singular orbits of the cubic regime.

    ``eps1_tilde`` is the chart-level perturbation ``eps1 / eps2**2``
    frozen along the family.  The orbit starts at the entry point
    ``O2 = (0, 0, sqrt(eps1_tilde))`` of chart ``K3_2``, runs along the
    fast fibre at ``z2 = 0`` to the attracting branch of ``S2``, follows
    it for ``z2`` in ``[0, 1]``, hands off to chart ``K3_3`` at
    ``z2 = 1``, and follows the attracting branch there (``sigma3**2 *
    eps13`` stays equal to ``eps1_tilde``) until it is within
    :data:`TERMINATION_RADIUS` of the equilibrium ``Q3``.
    """
    _validate_common(c, n_points)
    if not eps1_tilde > 0.0:
        raise ValueError(f"eps1_tilde must be positive, got {eps1_tilde!r}")
    sigma2 = math.sqrt(eps1_tilde)
    if not sigma2 < c:
        raise ValueError(
            f"eps1_tilde must satisfy sqrt(eps1_tilde) < c, got {eps1_tilde!r}"
        )
    root = math.sqrt(c)
    fast = _straight_points((0.0, 0.0, sigma2), (root, 0.0, sigma2), n_points)

    def branch_K2(z2: np.ndarray) -> np.ndarray:
        y2 = 0.5 * (-z2 + np.sqrt(z2 * z2 + 4.0 * (c - sigma2 * z2)))
        return np.column_stack([y2, z2, np.full_like(z2, sigma2)])

    slow_K2 = _equidistribute(
        np.linspace(0.0, 1.0, _dense_grid(n_points)), branch_K2, n_points
    )
    slow_K2[0] = fast[-1]

    y3_entry = float(slow_K2[-1, 0])

    def branch_K3(sigma3: np.ndarray) -> np.ndarray:
        w = eps1_tilde * (c - sigma3) / (sigma3 * sigma3)
        y3 = 0.5 * (-1.0 + np.sqrt(1.0 + 4.0 * w))
        eps13 = eps1_tilde / (sigma3 * sigma3)
        return np.column_stack([y3, sigma3, eps13])

    q3 = np.array([0.0, c, eps1_tilde / (c * c)])

    def distance_to_Q3(lam: float) -> float:
        point = branch_K3(np.array([c - lam]))[0]
        return float(np.linalg.norm(point - q3)) - TERMINATION_RADIUS

    lam_stop = _bisect_decreasing(distance_to_Q3, c - sigma2, 1e-300)
    sigma3_stop = c - lam_stop
    t_grid = np.linspace(0.0, math.log(sigma3_stop / sigma2), _dense_grid(n_points))
    slow_K3 = _equidistribute(
        t_grid, lambda t: branch_K3(sigma2 * np.exp(t)), n_points
    )
    slow_K3[0] = (y3_entry, sigma2, 1.0)
    slow_K3 = np.vstack([slow_K3, q3])

    return SingularOrbit(
        segments=(
            OrbitSegment(FAST, "K3_2", fast),
            OrbitSegment(SLOW, "K3_2", slow_K2),
            OrbitSegment(SLOW, "K3_3", slow_K3, note="handoff from K3_2 at z2 = 1"),
        ),
        regime=Regime.B3,
        params={"eps1_tilde": float(eps1_tilde), "c": float(c), "n_points": n_points},
    )


def _validate_common(c: float, n_points: int) -> None:
    if not c > 0.0:
        raise ValueError(f"c must be positive, got {c!r}")
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points!r}")


# ---------------------------------------------------------------------------
# predictions and coordinate maps
# ---------------------------------------------------------------------------


def y_max_prediction(params) -> float:
    """Leading-order prediction ``sqrt(eps1 * c)`` of the first maximum of y.

    The neglected correction is of order ``eps2 * sqrt(eps1)`` relative
    to the returned value; it is reported by the comparison layer, not
    folded into the prediction.
    """
    return math.sqrt(params.eps1 * params.c)


_BASE_PLANE_MAPS: dict[str, Callable[[np.ndarray, float], np.ndarray]] = {
    "b2": lambda pts, c: pts[:, :2],
    "b11_base": lambda pts, c: pts[:, :2],
    "K11_1": lambda pts, c: np.column_stack(
        [pts[:, 2], c + pts[:, 2] ** 2 * pts[:, 0]]
    ),
    "K11_2": lambda pts, c: np.column_stack(
        [pts[:, 2] * pts[:, 0], c + pts[:, 2] ** 2 * pts[:, 1]]
    ),
    "K12_3": lambda pts, c: np.column_stack(
        [pts[:, 2] * pts[:, 0], c - pts[:, 2] ** 2]
    ),
    "K12_2": lambda pts, c: np.column_stack(
        [pts[:, 2] * pts[:, 0], c + pts[:, 2] ** 2 * pts[:, 1]]
    ),
    "K3_2": lambda pts, c: np.column_stack(
        [pts[:, 2] * pts[:, 0], pts[:, 2] * pts[:, 1]]
    ),
    "K3_3": lambda pts, c: np.column_stack(
        [pts[:, 1] * pts[:, 0], pts[:, 1]]
    ),
}


def to_plane_coords(orbit: SingularOrbit) -> np.ndarray:
    """Map a singular orbit to one connected polyline in the rescaled plane.

    The plane is the one the orbit's parameter chart rescales to:
    ``(y/sqrt(eps1), z)`` for the B2/B11/B12 families and ``(y/eps2, z)``
    for B3.  Segments on the blow-up sphere sit at zero radial
    coordinate, so they map to the fold point ``(0, c)``; consecutive
    duplicate vertices are dropped.
    """
    c = float(orbit.params["c"])
    merged = np.vstack(
        [_segment_base_plane(segment, c) for segment in orbit.segments]
    )
    keep = np.ones(merged.shape[0], dtype=bool)
    keep[1:] = np.any(merged[1:] != merged[:-1], axis=1)
    return merged[keep]


def to_original_coords(orbit: SingularOrbit, params) -> np.ndarray:
    """Map a singular orbit to one connected polyline in original (y, z).

    ``params`` supplies the radial scale that undoes the regime's
    rescaling: ``y = sqrt(eps1) * y_tilde`` for the B2/B11/B12 families
    and ``y = eps2 * y_tilde`` for B3.  Segments on the blow-up sphere
    sit at zero radial coordinate, so they map to a single point (the
    degenerate fold ``(0, c)``); consecutive duplicate vertices are
    dropped.  The orbit endpoint maps to the equilibrium ``(0, c)``
    exactly.
    """
    c = float(orbit.params["c"])
    if orbit.regime is Regime.B3:
        radial = float(params.eps2)
    else:
        radial = math.sqrt(float(params.eps1))
    pieces = []
    for segment in orbit.segments:
        plane = _segment_base_plane(segment, c)
        pieces.append(np.column_stack([radial * plane[:, 0], plane[:, 1]]))
    merged = np.vstack(pieces)
    keep = np.ones(merged.shape[0], dtype=bool)
    keep[1:] = np.any(merged[1:] != merged[:-1], axis=1)
    return merged[keep]


def _segment_base_plane(segment: OrbitSegment, c: float) -> np.ndarray:
    try:
        mapper = _BASE_PLANE_MAPS[segment.chart]
    except KeyError:
        raise ChartUndefined(f"no base-plane map for chart {segment.chart!r}") from None
    return mapper(segment.points, c)


# ---------------------------------------------------------------------------
# continuity diagnostics
# ---------------------------------------------------------------------------

_CHART_FACTORIES = {
    "K12_2": chart_K12_2,
    "K12_3": chart_K12_3,
    "K3_2": chart_K3_2,
    "K3_3": chart_K3_3,
}


def junction_gaps(orbit: SingularOrbit) -> list[float]:
    """Distance between consecutive segment endpoints in a common frame.

    Junctions between directional charts are composed through the base
    coordinates; junctions on the blow-up sphere use the sphere chart
    transitions; junctions between a base-plane segment and a sphere
    segment compare blown-down points (the sphere collapses onto the
    degenerate fold there, which is exactly the geometric statement of
    continuity).
    """
    c = float(orbit.params["c"])
    gaps = []
    for left, right in zip(orbit.segments, orbit.segments[1:]):
        gaps.append(_junction_gap(left, right, c))
    return gaps


def _junction_gap(left: OrbitSegment, right: OrbitSegment, c: float) -> float:
    end = np.asarray(left.end, dtype=float)
    start = np.asarray(right.start, dtype=float)
    if left.chart == right.chart:
        return float(np.linalg.norm(end - start))
    on_sphere = (
        left.chart in OMEGA_CHARTS
        and right.chart in OMEGA_CHARTS
        and abs(end[-1]) <= _SPHERE_BAND
        and abs(start[-1]) <= _SPHERE_BAND
    )
    if on_sphere:
        converted = sphere_chart_convert((end[0], end[1]), left.chart, right.chart)
        return float(np.linalg.norm(np.subtract(converted, start[:2])))
    if left.chart in _CHART_FACTORIES and right.chart in _CHART_FACTORIES:
        source = _CHART_FACTORIES[left.chart](0.0, c)
        target = _CHART_FACTORIES[right.chart](0.0, c)
        mapped = target.coord_map(source.inverse_map(end))
        return float(np.linalg.norm(np.asarray(mapped) - start))
    left_plane = _segment_base_plane(
        OrbitSegment(left.kind, left.chart, np.vstack([end, end])), c
    )[0]
    right_plane = _segment_base_plane(
        OrbitSegment(right.kind, right.chart, np.vstack([start, start])), c
    )[0]
    return float(np.linalg.norm(left_plane - right_plane))


# ---------------------------------------------------------------------------
# CSV serialisation
# ---------------------------------------------------------------------------


def write_orbit_csv(orbit: SingularOrbit, stream: IO[str]) -> None:
    """Write the orbit's chart-coordinate polylines as CSV.

    Columns are ``segment_index, kind, chart, coord1..coordk`` with ``k``
    the widest segment; narrower segments leave trailing coordinate
    cells empty.  Floats use shortest round-trip formatting.
    """
    width = max(segment.points.shape[1] for segment in orbit.segments)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        ["segment_index", "kind", "chart"] + [f"coord{i + 1}" for i in range(width)]
    )
    for index, segment in enumerate(orbit.segments):
        for row in segment.points:
            cells = [str(index), segment.kind, segment.chart]
            cells += [repr(float(value)) for value in row]
            cells += [""] * (width - row.shape[0])
            writer.writerow(cells)


def write_original_csv(orbit: SingularOrbit, params, stream: IO[str]) -> None:
    """Write the orbit mapped to original (y, z) coordinates as CSV."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["y", "z"])
    for y, z in to_original_coords(orbit, params):
        writer.writerow([repr(float(y)), repr(float(z))])
