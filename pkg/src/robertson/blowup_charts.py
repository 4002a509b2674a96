"""Phase-space blow-up charts for the reduced Robertson system.

The slow-fast analysis near the degenerate equilibrium uses one planar
rescaling chart and two weighted spherical blow-ups with directional
charts:

* ``b2`` -- the planar rescaling ``y = r * y_tilde`` of the reduced
  system (time divided by ``r`` once).
* ``K11_1`` / ``K11_2`` / ``K11_3`` -- directional charts of the
  weight-(1, 2, 1) spherical blow-up of the extended system
  ``(y, z, s)`` at ``(0, c, 0)``, parametrised by ``eps21``.
* ``K12_2`` / ``K12_3`` -- charts of the same spherical geometry for
  the branch parametrised by ``r1``.
* ``K3_2`` / ``K3_3`` -- directional charts of the weight-(1, 1, 2)
  spherical blow-up of ``(y_tilde, z, eps1_tilde)`` at the origin.

Every chart records its coordinate map, inverse map, desingularised
vector field and the power of the radial variable divided out.
``pushforward_check`` validates any chart against its base system with
a finite-difference chain rule and is the single numerical arbiter for
transcription mistakes in the hand-coded fields.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, NamedTuple

import numpy as np

from .model import ScaledParams, reduced_rhs
from .param_geometry import ChartUndefined, NotInvertibleOnBlowupLocus

__all__ = [
    "Chart",
    "ChartPoint",
    "Landmark",
    "PoleAt",
    "SingularJacobian",
    "OMEGA_CHARTS",
    "rescale_B2",
    "field_B2",
    "jacobian_B2",
    "crit_manifold_B2",
    "eigenvalue_B2",
    "transcritical_point",
    "blowup_B11_fwd",
    "blowup_B11_inv",
    "blowup_B3_fwd",
    "blowup_B3_inv",
    "field_b11_base",
    "field_b12_base",
    "field_b3_base",
    "field_K11_1",
    "field_K11_2",
    "field_K11_3",
    "field_K12_2",
    "field_K12_3",
    "field_K3_2",
    "field_K3_3",
    "sphere_field_K11_1",
    "sphere_field_K11_2",
    "sphere_field_K11_3",
    "sphere_jacobian_K11_1",
    "sphere_jacobian_K11_2",
    "sphere_chart_convert",
    "center_manifold_slope_K11",
    "omega_membership",
    "omega_boundary_flux",
    "chart_b2",
    "chart_K11_1",
    "chart_K11_2",
    "chart_K11_3",
    "chart_K12_2",
    "chart_K12_3",
    "chart_K3_2",
    "chart_K3_3",
    "landmark_Pa",
    "landmark_Pr",
    "landmark_Q2",
    "landmark_Q3",
    "landmark_O2",
    "landmark_O3",
    "landmark_fold",
    "landmark_transcritical",
    "numerical_jacobian",
    "pushforward_check",
]

#: Width of the band excluded around coordinate-map singularities.
_SINGULAR_BAND = 1e-10


class PoleAt(ValueError):
    """A critical-manifold expression was evaluated at (or too close to) its pole."""

    def __init__(self, y: float) -> None:
        super().__init__(f"critical-manifold expression has a pole at y = {y!r}")
        self.y = y


class SingularJacobian(RuntimeError):
    """The chart-map Jacobian is too ill-conditioned to invert.

    Raised by :func:`pushforward_check` for points at or extremely close
    to the blow-up locus, where pulling the base field back through the
    chart map is numerically meaningless.
    """


class ChartPoint(NamedTuple):
    """Coordinates tagged with the chart they live in."""

    chart: str
    coords: tuple[float, ...]


class Landmark(NamedTuple):
    """A named special point of the blown-up dynamics, in a specific chart."""

    name: str
    chart: str
    coords: tuple[float, ...]


@dataclasses.dataclass(frozen=True)
class Chart:
    """A blow-up chart: coordinate change plus desingularised dynamics.

    ``coord_map`` sends base coordinates to chart coordinates and raises
    :class:`~robertson.param_geometry.ChartUndefined` off its domain;
    ``inverse_map`` goes back.  ``desing_field`` is the chart vector
    field obtained from the pulled-back base field after dividing by
    ``radial(point) ** desing_power``.  ``in_domain`` is the chart's
    interior predicate; a band of width 1e-10 around map singularities
    is excluded.
    """

    name: str
    coord_map: Callable[[np.ndarray], np.ndarray]
    inverse_map: Callable[[np.ndarray], np.ndarray]
    desing_field: Callable[[np.ndarray], np.ndarray]
    base_field: Callable[[np.ndarray], np.ndarray]
    desing_power: int
    radial: Callable[[np.ndarray], float]
    in_domain: Callable[[np.ndarray], bool]

    def __post_init__(self) -> None:
        if self.desing_power < 0:
            raise ValueError("desing_power must be non-negative")


# ---------------------------------------------------------------------------
# Planar rescaling chart (b2)
# ---------------------------------------------------------------------------


def rescale_B2(state: np.ndarray, r: float) -> np.ndarray:
    """Map reduced coordinates ``(y, z)`` to rescaled ``(y_tilde, z)``."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    y, z = np.asarray(state, dtype=float)
    return np.array([y / r, z])


def field_B2(state: np.ndarray, r: float, eps2_tilde: float, c: float) -> np.ndarray:
    """Rescaled planar vector field; at ``r = 0`` it is the layer problem."""
    y, z = np.asarray(state, dtype=float)
    return np.array([c - r * y - z - y * y - eps2_tilde * y * z, r * y * y])


def jacobian_B2(state: np.ndarray, r: float, eps2_tilde: float, c: float) -> np.ndarray:
    """Jacobian of :func:`field_B2` with respect to ``(y_tilde, z)``."""
    y, z = np.asarray(state, dtype=float)
    return np.array(
        [
            [-r - 2.0 * y - eps2_tilde * z, -1.0 - eps2_tilde * y],
            [2.0 * r * y, 0.0],
        ]
    )


def crit_manifold_B2(y: float, eps2: float, c: float) -> float:
    """Height of the critical manifold ``z = (c - y^2) / (1 + eps2*y)``.

    ``eps2`` is the coefficient of the ``y*z`` interaction in whichever
    frame the caller works in (the original reduced system or the
    rescaled one).
    """
    denominator = 1.0 + eps2 * y
    if abs(denominator) <= _SINGULAR_BAND:
        raise PoleAt(y)
    return (c - y * y) / denominator


def eigenvalue_B2(y: float, z: float, eps2: float) -> float:
    """Nontrivial layer eigenvalue ``-2y - eps2*z`` along the critical manifold."""
    return -2.0 * y - eps2 * z


def transcritical_point(eps2: float, c: float) -> tuple[float, float] | None:
    """Self-intersection point of the critical manifold, if the frame has one.

    The two branches of the manifold cross at ``(-sqrt(c), 2c)`` exactly
    when ``1/eps2^2 = c``; otherwise ``None`` is returned.
    """
    if eps2 <= 0.0:
        return None
    if abs(1.0 / (eps2 * eps2) - c) <= 1e-12:
        return (-math.sqrt(c), 2.0 * c)
    return None


# ---------------------------------------------------------------------------
# Weighted spherical blow-up maps
# ---------------------------------------------------------------------------


def _check_unit_sphere(*components: float) -> None:
    norm = math.fsum(value * value for value in components)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError("(ybar, zbar, sbar) must lie on the unit sphere")


def blowup_B11_fwd(
    sigma: float, ybar: float, zbar: float, sbar: float, c: float
) -> np.ndarray:
    """Weight-(1, 2, 1) blow-down ``(y, z, s) = (sigma*ybar, c + sigma^2*zbar, sigma*sbar)``."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    _check_unit_sphere(ybar, zbar, sbar)
    return np.array([sigma * ybar, c + sigma * sigma * zbar, sigma * sbar])


def blowup_B11_inv(
    y: float, z: float, s: float, c: float
) -> tuple[float, float, float, float]:
    """Invert the weight-(1, 2, 1) blow-up; returns ``(sigma, ybar, zbar, sbar)``.

    The weighted sphere constraint reduces to a quadratic in ``sigma^2``
    with a single positive root, so the inverse is closed-form.
    """
    deviation = z - c
    quadratic = y * y + s * s
    sigma_sq = 0.5 * (quadratic + math.hypot(quadratic, 2.0 * deviation))
    if sigma_sq == 0.0:
        raise NotInvertibleOnBlowupLocus(
            "the blow-up point (0, c, 0) has no preimage on the sphere bundle"
        )
    sigma = math.sqrt(sigma_sq)
    return (sigma, y / sigma, deviation / sigma_sq, s / sigma)


def blowup_B3_fwd(sigma: float, ybar: float, zbar: float, e1bar: float) -> np.ndarray:
    """Weight-(1, 1, 2) blow-down ``(y, z, eps1) = (sigma*ybar, sigma*zbar, sigma^2*e1bar)``."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    _check_unit_sphere(ybar, zbar, e1bar)
    return np.array([sigma * ybar, sigma * zbar, sigma * sigma * e1bar])


def blowup_B3_inv(y: float, z: float, eps1: float) -> tuple[float, float, float, float]:
    """Invert the weight-(1, 1, 2) blow-up; returns ``(sigma, ybar, zbar, e1bar)``."""
    quadratic = y * y + z * z
    sigma_sq = 0.5 * (quadratic + math.hypot(quadratic, 2.0 * eps1))
    if sigma_sq == 0.0:
        raise NotInvertibleOnBlowupLocus(
            "the origin has no preimage on the sphere bundle"
        )
    sigma = math.sqrt(sigma_sq)
    return (sigma, y / sigma, z / sigma, eps1 / sigma_sq)


# ---------------------------------------------------------------------------
# Base (extended) systems the charts desingularise
# ---------------------------------------------------------------------------


def field_b11_base(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """Extended rescaled system ``(y, z, s)`` with ``s`` frozen, branch ``eps21``."""
    y, z, s = np.asarray(state, dtype=float)
    return np.array([c - s * y - z - y * y - s * eps21 * y * z, s * y * y, 0.0])


def field_b12_base(state: np.ndarray, r1: float, c: float) -> np.ndarray:
    """Extended rescaled system ``(y, z, s)`` with ``s`` frozen, branch ``r1``."""
    y, z, s = np.asarray(state, dtype=float)
    return np.array([c - s * r1 * y - z - y * y - s * y * z, s * r1 * y * y, 0.0])


def field_b3_base(state: np.ndarray, r: float, c: float) -> np.ndarray:
    """Extended system ``(y_tilde, z, eps1_tilde)`` with ``eps1_tilde`` frozen."""
    y, z, e1 = np.asarray(state, dtype=float)
    return np.array([e1 * (c - r * y - z) - y * y - y * z, r * y * y, 0.0])


# ---------------------------------------------------------------------------
# Desingularised chart vector fields
# ---------------------------------------------------------------------------


def field_K11_1(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """Chart ``K11_1`` field in ``(z1, s1, sigma1)``; ``sigma1*s1`` is conserved."""
    z1, s1, sigma1 = np.asarray(state, dtype=float)
    shared = s1 + z1 + 1.0 + sigma1 * sigma1 * eps21 * s1 * z1 + s1 * eps21 * c
    return np.array([s1 + 2.0 * z1 * shared, s1 * shared, -sigma1 * shared])


def field_K11_2(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """Chart ``K11_2`` field in ``(y2, z2, sigma2)``; ``sigma2`` is constant."""
    y2, z2, sigma2 = np.asarray(state, dtype=float)
    dy2 = -y2 - z2 - y2 * y2 - y2 * eps21 * c - sigma2 * sigma2 * z2 * y2 * eps21
    return np.array([dy2, y2 * y2, 0.0])


def field_K11_3(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """Chart ``K11_3`` field in ``(y3, s3, sigma3)``."""
    y3, s3, sigma3 = np.asarray(state, dtype=float)
    dy3 = (
        -y3 * s3
        + 1.0
        - y3 * y3
        + sigma3 * sigma3 * eps21 * y3 * s3
        - s3 * eps21 * y3 * c
        + 0.5 * y3 * y3 * y3 * s3
    )
    return np.array([dy3, 0.5 * y3 * y3 * s3 * s3, -0.5 * sigma3 * y3 * y3 * s3])


def field_K12_2(state: np.ndarray, r1: float, c: float) -> np.ndarray:
    """Chart ``K12_2`` field in ``(y2, z2, sigma2)``; ``sigma2`` is constant."""
    y2, z2, sigma2 = np.asarray(state, dtype=float)
    dy2 = -z2 - y2 * y2 - y2 * c - sigma2 * sigma2 * y2 * z2 - r1 * y2
    return np.array([dy2, r1 * y2 * y2, 0.0])


def field_K12_3(state: np.ndarray, r1: float, c: float) -> np.ndarray:
    """Chart ``K12_3`` field in ``(y3, s3, sigma3)``; ``sigma3*s3`` is conserved."""
    y3, s3, sigma3 = np.asarray(state, dtype=float)
    dy3 = (
        1.0
        - y3 * y3
        - y3 * s3 * c
        + sigma3 * sigma3 * s3 * y3
        - r1 * s3 * y3
        + 0.5 * r1 * s3 * y3 * y3 * y3
    )
    return np.array(
        [dy3, 0.5 * r1 * s3 * s3 * y3 * y3, -0.5 * r1 * sigma3 * s3 * y3 * y3]
    )


def field_K3_2(state: np.ndarray, r: float, c: float) -> np.ndarray:
    """Chart ``K3_2`` field in ``(y2, z2, sigma2)``; ``sigma2`` is constant."""
    y2, z2, sigma2 = np.asarray(state, dtype=float)
    dy2 = c - sigma2 * z2 - y2 * y2 - y2 * z2 - r * sigma2 * y2
    return np.array([dy2, r * y2 * y2, 0.0])


def field_K3_3(state: np.ndarray, r: float, c: float) -> np.ndarray:
    """Chart ``K3_3`` field in ``(y3, sigma3, eps13)``; ``sigma3^2*eps13`` is conserved."""
    y3, sigma3, e13 = np.asarray(state, dtype=float)
    dy3 = e13 * (c - r * sigma3 * y3 - sigma3) - y3 * y3 - y3 - r * y3 * y3 * y3
    return np.array([dy3, r * sigma3 * y3 * y3, -2.0 * r * e13 * y3 * y3])


# ---------------------------------------------------------------------------
# Restrictions to the blow-up sphere (radial coordinate frozen at zero)
# ---------------------------------------------------------------------------


def sphere_field_K11_1(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """``K11_1`` field restricted to the sphere ``sigma1 = 0``."""
    z1, s1 = np.asarray(state, dtype=float)
    shared = s1 + z1 + 1.0 + s1 * eps21 * c
    return np.array([s1 + 2.0 * z1 * shared, s1 * shared])


def sphere_jacobian_K11_1(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """Jacobian of :func:`sphere_field_K11_1` with respect to ``(z1, s1)``."""
    z1, s1 = np.asarray(state, dtype=float)
    shared = s1 + z1 + 1.0 + s1 * eps21 * c
    shared_s = 1.0 + eps21 * c
    return np.array(
        [
            [2.0 * shared + 2.0 * z1, 1.0 + 2.0 * z1 * shared_s],
            [s1, shared + s1 * shared_s],
        ]
    )


def sphere_field_K11_2(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """``K11_2`` field restricted to the sphere ``sigma2 = 0``."""
    y2, z2 = np.asarray(state, dtype=float)
    return np.array([-y2 - z2 - y2 * y2 - y2 * eps21 * c, y2 * y2])


def sphere_jacobian_K11_2(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """Jacobian of :func:`sphere_field_K11_2` with respect to ``(y2, z2)``."""
    y2, _ = np.asarray(state, dtype=float)
    return np.array([[-1.0 - 2.0 * y2 - eps21 * c, -1.0], [2.0 * y2, 0.0]])


def sphere_field_K11_3(state: np.ndarray, eps21: float, c: float) -> np.ndarray:
    """``K11_3`` field restricted to the sphere ``sigma3 = 0``."""
    y3, s3 = np.asarray(state, dtype=float)
    dy3 = -y3 * s3 + 1.0 - y3 * y3 - s3 * eps21 * y3 * c + 0.5 * y3 * y3 * y3 * s3
    return np.array([dy3, 0.5 * y3 * y3 * s3 * s3])


def center_manifold_slope_K11(eps21: float, c: float) -> float:
    """First-order coefficient of the attracting center manifold at ``Pa``.

    The manifold is the graph ``z1 = -1 + slope * s1 + O(s1^2)`` with
    ``slope = -(1/2 + eps21 * c)``.
    """
    return -(0.5 + eps21 * c)


# ---------------------------------------------------------------------------
# The trapping region Omega on the blow-up sphere
# ---------------------------------------------------------------------------

#: Charts in which the trapping region is expressed.
OMEGA_CHARTS = ("K11_1", "K11_2", "K11_3")

_SPHERE_CONVERSIONS: dict[tuple[str, str], Callable[[float, float], tuple[float, float]]] = {
    ("K11_1", "K11_2"): lambda z1, s1: (1.0 / s1, z1 / (s1 * s1)),
    ("K11_1", "K11_3"): lambda z1, s1: (
        1.0 / math.sqrt(-z1),
        s1 / math.sqrt(-z1),
    ),
    ("K11_2", "K11_1"): lambda y2, z2: (z2 / (y2 * y2), 1.0 / y2),
    ("K11_2", "K11_3"): lambda y2, z2: (
        y2 / math.sqrt(-z2),
        1.0 / math.sqrt(-z2),
    ),
    ("K11_3", "K11_1"): lambda y3, s3: (-1.0 / (y3 * y3), s3 / y3),
    ("K11_3", "K11_2"): lambda y3, s3: (y3 / s3, -1.0 / (s3 * s3)),
}

_SPHERE_VISIBILITY: dict[tuple[str, str], Callable[[float, float], bool]] = {
    ("K11_1", "K11_2"): lambda z1, s1: s1 > _SINGULAR_BAND,
    ("K11_1", "K11_3"): lambda z1, s1: z1 < -_SINGULAR_BAND,
    ("K11_2", "K11_1"): lambda y2, z2: y2 > _SINGULAR_BAND,
    ("K11_2", "K11_3"): lambda y2, z2: z2 < -_SINGULAR_BAND,
    ("K11_3", "K11_1"): lambda y3, s3: y3 > _SINGULAR_BAND,
    ("K11_3", "K11_2"): lambda y3, s3: s3 > _SINGULAR_BAND,
}


def sphere_chart_convert(
    coords: tuple[float, float], source: str, target: str
) -> tuple[float, float]:
    """Re-express a point of the blow-up sphere in another directional chart.

    ``coords`` are the two sphere coordinates of ``source`` (the radial
    variable is zero).  Raises ChartUndefined when the point is not
    visible in ``target``.
    """
    for name in (source, target):
        if name not in OMEGA_CHARTS:
            raise ChartUndefined(f"unknown sphere chart {name!r}")
    if source == target:
        return (float(coords[0]), float(coords[1]))
    a, b = float(coords[0]), float(coords[1])
    if not _SPHERE_VISIBILITY[(source, target)](a, b):
        raise ChartUndefined(
            f"point {coords!r} of chart {source} is not visible in chart {target}"
        )
    return _SPHERE_CONVERSIONS[(source, target)](a, b)


def _as_sphere_coords(point: ChartPoint | np.ndarray, chart: str | None) -> tuple[
    tuple[float, float], str
]:
    if isinstance(point, ChartPoint):
        source = point.chart
        raw = np.asarray(point.coords, dtype=float)
    else:
        if chart is None:
            raise ValueError("bare coordinates need an explicit chart name")
        source = chart
        raw = np.asarray(point, dtype=float)
    if raw.size == 3:
        if abs(raw[2]) > 1e-9:
            raise ValueError("point must lie on the sphere (radial coordinate 0)")
        raw = raw[:2]
    if raw.size != 2:
        raise ValueError("sphere points have two coordinates (plus optional radial 0)")
    return (float(raw[0]), float(raw[1])), source


def omega_membership(
    point: ChartPoint | np.ndarray, chart: str | None = None
) -> bool:
    """Whether a sphere point lies in the closed trapping region Omega.

    ``point`` is either a :class:`ChartPoint` (optionally re-expressed
    in ``chart`` before testing, raising ChartUndefined when not
    visible there) or bare coordinates interpreted in ``chart``.
    """
    coords, source = _as_sphere_coords(point, chart)
    target = chart if chart is not None else source
    coords = sphere_chart_convert(coords, source, target)
    if target == "K11_1":
        z1, s1 = coords
        return s1 >= 0.0 and s1 + z1 <= 0.0
    if target == "K11_2":
        y2, z2 = coords
        return y2 >= 0.0 and y2 + z2 <= 0.0
    y3, s3 = coords
    return y3 >= 0.0 and s3 >= 0.0 and y3 * s3 <= 1.0


def omega_boundary_flux(
    point: ChartPoint | np.ndarray,
    eps21: float,
    c: float,
    chart: str | None = None,
    edge_tol: float = 1e-9,
) -> float:
    """Outward flux through the Omega boundary at a point on it.

    Each boundary edge is written as ``g <= 0`` with ``g`` positive
    outside; the returned value is ``dg/dt`` along the sphere flow for
    the active edge (the largest value when the point sits on a
    corner).  Forward invariance of Omega means the result is never
    positive.
    """
    coords, source = _as_sphere_coords(point, chart)
    target = chart if chart is not None else source
    a, b = sphere_chart_convert(coords, source, target)
    fluxes: list[float] = []
    if target == "K11_1":
        flow = sphere_field_K11_1((a, b), eps21, c)
        if abs(b) <= edge_tol:  # equator s1 = 0
            fluxes.append(-flow[1])
        if abs(a + b) <= edge_tol:  # curve s1 = -z1
            fluxes.append(flow[0] + flow[1])
    elif target == "K11_2":
        flow = sphere_field_K11_2((a, b), eps21, c)
        if abs(a) <= edge_tol:  # far arc y2 = 0
            fluxes.append(-flow[0])
        if abs(a + b) <= edge_tol:  # curve y2 = -z2
            fluxes.append(flow[0] + flow[1])
    else:
        flow = sphere_field_K11_3((a, b), eps21, c)
        if abs(a) <= edge_tol:  # far arc y3 = 0
            fluxes.append(-flow[0])
        if abs(b) <= edge_tol:  # equator s3 = 0
            fluxes.append(-flow[1])
        if abs(a * b - 1.0) <= edge_tol:  # curve y3*s3 = 1
            fluxes.append(b * flow[0] + a * flow[1])
    if not fluxes:
        raise ValueError("point does not lie on the boundary of Omega")
    return float(max(fluxes))


# ---------------------------------------------------------------------------
# Chart constructors
# ---------------------------------------------------------------------------


def chart_b2(r: float, eps2_tilde: float, c: float) -> Chart:
    """Planar rescaling chart of the reduced system at radial scale ``r``."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    params = ScaledParams(eps1=r * r, eps2=r * eps2_tilde, c=c)

    def coord(base: np.ndarray) -> np.ndarray:
        return rescale_B2(base, r)

    def inverse(point: np.ndarray) -> np.ndarray:
        y_tilde, z = np.asarray(point, dtype=float)
        return np.array([r * y_tilde, z])

    return Chart(
        name="b2",
        coord_map=coord,
        inverse_map=inverse,
        desing_field=lambda point: field_B2(point, r, eps2_tilde, c),
        base_field=lambda base: reduced_rhs(base, params),
        desing_power=1,
        radial=lambda point: r,
        in_domain=lambda point: True,
    )


def _chart_direction_y(name: str, desing, base, c: float) -> Chart:
    """Directional chart with ``ybar = 1``: ``(y, z, s) = (sig, c + sig^2*z1, sig*s1)``."""

    def coord(base_point: np.ndarray) -> np.ndarray:
        y, z, s = np.asarray(base_point, dtype=float)
        if y <= _SINGULAR_BAND:
            raise ChartUndefined(f"{name} needs y > 0")
        return np.array([(z - c) / (y * y), s / y, y])

    def inverse(point: np.ndarray) -> np.ndarray:
        z1, s1, sigma1 = np.asarray(point, dtype=float)
        return np.array([sigma1, c + sigma1 * sigma1 * z1, sigma1 * s1])

    return Chart(
        name=name,
        coord_map=coord,
        inverse_map=inverse,
        desing_field=desing,
        base_field=base,
        desing_power=1,
        radial=lambda point: float(point[2]),
        in_domain=lambda point: point[2] > _SINGULAR_BAND,
    )


def _chart_direction_s(name: str, desing, base, c: float) -> Chart:
    """Directional chart with ``sbar = 1``: ``(y, z, s) = (sig*y2, c + sig^2*z2, sig)``."""

    def coord(base_point: np.ndarray) -> np.ndarray:
        y, z, s = np.asarray(base_point, dtype=float)
        if s <= _SINGULAR_BAND:
            raise ChartUndefined(f"{name} needs s > 0")
        return np.array([y / s, (z - c) / (s * s), s])

    def inverse(point: np.ndarray) -> np.ndarray:
        y2, z2, sigma2 = np.asarray(point, dtype=float)
        return np.array([sigma2 * y2, c + sigma2 * sigma2 * z2, sigma2])

    return Chart(
        name=name,
        coord_map=coord,
        inverse_map=inverse,
        desing_field=desing,
        base_field=base,
        desing_power=1,
        radial=lambda point: float(point[2]),
        in_domain=lambda point: point[2] > _SINGULAR_BAND,
    )


def _chart_direction_z(name: str, desing, base, c: float) -> Chart:
    """Directional chart with ``zbar = -1``: ``(y, z, s) = (sig*y3, c - sig^2, sig*s3)``."""

    def coord(base_point: np.ndarray) -> np.ndarray:
        y, z, s = np.asarray(base_point, dtype=float)
        if c - z <= _SINGULAR_BAND * _SINGULAR_BAND:
            raise ChartUndefined(f"{name} needs z < c")
        sigma3 = math.sqrt(c - z)
        return np.array([y / sigma3, s / sigma3, sigma3])

    def inverse(point: np.ndarray) -> np.ndarray:
        y3, s3, sigma3 = np.asarray(point, dtype=float)
        return np.array([sigma3 * y3, c - sigma3 * sigma3, sigma3 * s3])

    return Chart(
        name=name,
        coord_map=coord,
        inverse_map=inverse,
        desing_field=desing,
        base_field=base,
        desing_power=1,
        radial=lambda point: float(point[2]),
        in_domain=lambda point: point[2] > _SINGULAR_BAND,
    )


def chart_K11_1(eps21: float, c: float) -> Chart:
    return _chart_direction_y(
        "K11_1",
        lambda point: field_K11_1(point, eps21, c),
        lambda base: field_b11_base(base, eps21, c),
        c,
    )


def chart_K11_2(eps21: float, c: float) -> Chart:
    return _chart_direction_s(
        "K11_2",
        lambda point: field_K11_2(point, eps21, c),
        lambda base: field_b11_base(base, eps21, c),
        c,
    )


def chart_K11_3(eps21: float, c: float) -> Chart:
    return _chart_direction_z(
        "K11_3",
        lambda point: field_K11_3(point, eps21, c),
        lambda base: field_b11_base(base, eps21, c),
        c,
    )


def chart_K12_2(r1: float, c: float) -> Chart:
    return _chart_direction_s(
        "K12_2",
        lambda point: field_K12_2(point, r1, c),
        lambda base: field_b12_base(base, r1, c),
        c,
    )


def chart_K12_3(r1: float, c: float) -> Chart:
    return _chart_direction_z(
        "K12_3",
        lambda point: field_K12_3(point, r1, c),
        lambda base: field_b12_base(base, r1, c),
        c,
    )


def chart_K3_2(r: float, c: float) -> Chart:
    """Chart with ``e1bar = 1``: ``(y, z, eps1) = (sig*y2, sig*z2, sig^2)``."""

    def coord(base_point: np.ndarray) -> np.ndarray:
        y, z, e1 = np.asarray(base_point, dtype=float)
        if e1 <= _SINGULAR_BAND * _SINGULAR_BAND:
            raise ChartUndefined("K3_2 needs eps1 > 0")
        sigma2 = math.sqrt(e1)
        return np.array([y / sigma2, z / sigma2, sigma2])

    def inverse(point: np.ndarray) -> np.ndarray:
        y2, z2, sigma2 = np.asarray(point, dtype=float)
        return np.array([sigma2 * y2, sigma2 * z2, sigma2 * sigma2])

    return Chart(
        name="K3_2",
        coord_map=coord,
        inverse_map=inverse,
        desing_field=lambda point: field_K3_2(point, r, c),
        base_field=lambda base: field_b3_base(base, r, c),
        desing_power=1,
        radial=lambda point: float(point[2]),
        in_domain=lambda point: point[2] > _SINGULAR_BAND,
    )


def chart_K3_3(r: float, c: float) -> Chart:
    """Chart with ``zbar = 1``: ``(y, z, eps1) = (sig*y3, sig, sig^2*eps13)``."""

    def coord(base_point: np.ndarray) -> np.ndarray:
        y, z, e1 = np.asarray(base_point, dtype=float)
        if z <= _SINGULAR_BAND:
            raise ChartUndefined("K3_3 needs z > 0")
        return np.array([y / z, z, e1 / (z * z)])

    def inverse(point: np.ndarray) -> np.ndarray:
        y3, sigma3, e13 = np.asarray(point, dtype=float)
        return np.array([sigma3 * y3, sigma3, sigma3 * sigma3 * e13])

    return Chart(
        name="K3_3",
        coord_map=coord,
        inverse_map=inverse,
        desing_field=lambda point: field_K3_3(point, r, c),
        base_field=lambda base: field_b3_base(base, r, c),
        desing_power=1,
        radial=lambda point: float(point[1]),
        in_domain=lambda point: point[1] > _SINGULAR_BAND,
    )


# ---------------------------------------------------------------------------
# Landmarks
# ---------------------------------------------------------------------------


def landmark_Pa() -> Landmark:
    """Attracting sphere equilibrium (eigenvalues -2 and 0)."""
    return Landmark("Pa", "K11_1", (-1.0, 0.0, 0.0))


def landmark_Pr() -> Landmark:
    """Repelling sphere equilibrium (eigenvalues 2 and 1)."""
    return Landmark("Pr", "K11_1", (0.0, 0.0, 0.0))


def landmark_Q2() -> Landmark:
    """Semi-stable endpoint of the sphere heteroclinic (eigenvalues -1-eps21*c, 0)."""
    return Landmark("Q2", "K11_2", (0.0, 0.0, 0.0))


def landmark_Q3(c: float, eps1: float) -> Landmark:
    """Terminal equilibrium of the ``K3_3`` flow.

    ``eps1`` is the rescaled parameter carried by the chart family (the
    conserved value of ``sigma3^2 * eps13``).
    """
    return Landmark("Q3", "K3_3", (0.0, c, eps1 / (c * c)))


def landmark_O2(eps1_tilde: float) -> Landmark:
    """Entry corner of the ``K3_2`` fast fiber (not an equilibrium)."""
    if eps1_tilde <= 0.0:
        raise ValueError("eps1_tilde must be positive")
    return Landmark("O2", "K3_2", (0.0, 0.0, math.sqrt(eps1_tilde)))


def landmark_O3(eps2_tilde: float, c: float) -> Landmark:
    """Entry corner of the ``K12_3`` fast fiber (not an equilibrium)."""
    if eps2_tilde <= 0.0 or c <= 0.0:
        raise ValueError("eps2_tilde and c must be positive")
    root_c = math.sqrt(c)
    return Landmark("O3", "K12_3", (0.0, eps2_tilde / root_c, root_c))


def landmark_fold(c: float) -> Landmark:
    """Fold of the ``K12_2`` critical manifold on the sphere ``sigma2 = 0``."""
    return Landmark("Fold", "K12_2", (-0.5 * c, 0.25 * c * c, 0.0))


def landmark_transcritical(eps2: float, c: float) -> Landmark | None:
    """Transcritical self-intersection of the planar critical manifold, if any."""
    point = transcritical_point(eps2, c)
    if point is None:
        return None
    return Landmark("Transcritical", "b2", point)


# ---------------------------------------------------------------------------
# Pushforward consistency checking
# ---------------------------------------------------------------------------


def numerical_jacobian(
    fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, rel_step: float = 1e-7
) -> np.ndarray:
    """Central-difference Jacobian of a vector map, one column per coordinate."""
    x = np.asarray(x, dtype=float)
    columns = []
    for j in range(x.size):
        step = rel_step * max(abs(x[j]), 1.0)
        forward = x.copy()
        forward[j] += step
        backward = x.copy()
        backward[j] -= step
        columns.append(
            (np.asarray(fn(forward), dtype=float) - np.asarray(fn(backward), dtype=float))
            / (2.0 * step)
        )
    return np.column_stack(columns)


def pushforward_check(
    chart: Chart,
    base_field: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    rel_step: float = 1e-7,
) -> float:
    """Relative deviation between a chart's field and the transported base field.

    The base field is evaluated at the blow-down of ``point``, pulled
    back through the finite-difference Jacobian of the chart's inverse
    map, divided by ``radial ** desing_power``, and compared with the
    hand-coded desingularised field.  The error grows as the radial
    coordinate tends to zero with a fixed difference step; that is
    expected, not a defect.
    """
    point = np.asarray(point, dtype=float)
    radial = chart.radial(point)
    if radial <= _SINGULAR_BAND:
        raise SingularJacobian(
            f"point of chart {chart.name} is on (or within 1e-10 of) the blow-up locus"
        )
    jacobian = numerical_jacobian(chart.inverse_map, point, rel_step)
    condition = np.linalg.cond(jacobian)
    if not np.isfinite(condition) or condition > 1e12:
        raise SingularJacobian(
            f"chart-map Jacobian of {chart.name} is numerically singular "
            f"(condition number {condition:.3e})"
        )
    transported = np.linalg.solve(
        jacobian, np.asarray(base_field(chart.inverse_map(point)), dtype=float)
    )
    transported /= radial**chart.desing_power
    expected = np.asarray(chart.desing_field(point), dtype=float)
    scale = np.linalg.norm(expected)
    return float(np.linalg.norm(transported - expected) / max(scale, 1e-300))
