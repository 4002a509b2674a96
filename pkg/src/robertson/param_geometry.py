"""Parameter-plane geometry: regime classification and parameter blow-up charts.

The small-parameter plane (eps1, eps2) is split inside the disc of radius
``delta`` by three curves,

    C1: eps1 = beta1 * eps2        (a line through the origin)
    C2: eps1 = beta2 * eps2**2     (outer parabola)
    C3: eps1 = beta3 * eps2**2     (inner parabola)

into the regimes

    B11: eps1 > beta2*eps2**2 and eps1 > beta1*eps2
    B12: eps1 > beta2*eps2**2 and eps1 < beta1*eps2
    B2:  beta3*eps2**2 <= eps1 <= beta2*eps2**2   (closed; contains C2 and C3)
    B3:  eps1 < beta3*eps2**2

The degenerate origin is resolved by a weighted polar blow-up
``eps1 = r**2 * eps1_bar, eps2 = r * eps2_bar`` with ``eps1_bar**2 +
eps2_bar**2 = 1``, worked with in two directional charts:

    P1: eps1 = r**2,            eps2 = r * eps2_tilde
    P2: eps1 = r**2 * eps1_tilde, eps2 = r

Chart P1 is refined once more near its own degenerate direction:

    P11: r = s,         eps2_tilde = s * eps21     (so eps21 = eps2/eps1)
    P12: eps2_tilde = s, r = s * r1

All maps here are exact coordinate algebra; classification always happens in
the original (eps1, eps2) parameters, with the curves above authoritative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "RegimeConfig",
    "Regime",
    "P1Coords",
    "P2Coords",
    "P11Coords",
    "P12Coords",
    "NotInvertibleOnBlowupLocus",
    "ChartUndefined",
    "classify",
    "phi_par1_fwd",
    "phi_par1_inv",
    "chart_P1",
    "chart_P1_inv",
    "chart_P2",
    "chart_P2_inv",
    "chart_P11",
    "chart_P11_inv",
    "chart_P12",
    "chart_P12_inv",
]


class NotInvertibleOnBlowupLocus(ValueError):
    """Raised when a blow-down preimage is requested at the blown-up point."""


class ChartUndefined(ValueError):
    """Raised when a chart map is evaluated where its denominator vanishes."""


@dataclass(frozen=True)
class RegimeConfig:
    """Curve coefficients and disc radius of the regime decomposition."""

    beta1: float = 1.0
    beta2: float = 1.0
    beta3: float = 1e-3
    delta: float = 1.0

    def __post_init__(self) -> None:
        if not self.beta1 > 0.0:
            raise ValueError(f"beta1 must be positive, got {self.beta1!r}")
        if not 0.0 < self.beta3 < self.beta2:
            raise ValueError(
                f"need 0 < beta3 < beta2, got beta3={self.beta3!r}, beta2={self.beta2!r}"
            )
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta!r}")


class Regime(enum.Enum):
    """Where a parameter point sits relative to the regime decomposition.

    ``OnC2``/``OnC3`` exist for annotation purposes; :func:`classify` never
    returns them because B2 is closed and absorbs its boundary parabolas.
    """

    B11 = "B11"
    B12 = "B12"
    B2 = "B2"
    B3 = "B3"
    ON_C1 = "OnC1"
    ON_C2 = "OnC2"
    ON_C3 = "OnC3"
    OUTSIDE_DELTA = "OutsideDelta"
    ORIGIN = "Origin"


class P1Coords(NamedTuple):
    r: float
    eps2_tilde: float


class P2Coords(NamedTuple):
    r: float
    eps1_tilde: float


class P11Coords(NamedTuple):
    s: float
    eps21: float


class P12Coords(NamedTuple):
    s: float
    r1: float


def classify(eps1: float, eps2: float, config: RegimeConfig = RegimeConfig()) -> Regime:
    """Classify a parameter point; exactly one label applies to any point.

    Comparisons run in the original parameters.  Points on C1 are detected by
    exact float equality ``eps1 == beta1*eps2`` (the line is measure zero and
    only hit on purpose); the parabolas C2/C3 belong to the closed regime B2.
    """
    if eps1 < 0.0 or eps2 < 0.0:
        raise ValueError(f"parameters must be non-negative, got ({eps1!r}, {eps2!r})")
    if eps1 == 0.0 and eps2 == 0.0:
        return Regime.ORIGIN
    if eps1 * eps1 + eps2 * eps2 > config.delta * config.delta:
        return Regime.OUTSIDE_DELTA
    parabola = eps2 * eps2
    if eps1 < config.beta3 * parabola:
        return Regime.B3
    if eps1 <= config.beta2 * parabola:
        return Regime.B2
    line = config.beta1 * eps2
    if eps1 == line:
        return Regime.ON_C1
    return Regime.B11 if eps1 > line else Regime.B12


def phi_par1_fwd(r: float, eps1_bar: float, eps2_bar: float) -> tuple[float, float]:
    """Weighted polar blow-down: (r, direction on the weighted circle) -> (eps1, eps2)."""
    return r * r * eps1_bar, r * eps2_bar


def phi_par1_inv(eps1: float, eps2: float) -> tuple[float, float, float]:
    """Invert the weighted polar blow-up away from the origin.

    Solving ``eps1 = r**2*e1b, eps2 = r*e2b, e1b**2 + e2b**2 = 1`` for r
    reduces to a quadratic in ``r**2`` with a single positive root, so no
    iteration is needed.  Raises :class:`NotInvertibleOnBlowupLocus` at the
    origin, where every direction maps to the same point.
    """
    if eps1 < 0.0 or eps2 < 0.0:
        raise ValueError(f"parameters must be non-negative, got ({eps1!r}, {eps2!r})")
    if eps1 == 0.0 and eps2 == 0.0:
        raise NotInvertibleOnBlowupLocus("the origin blows up to the whole circle r = 0")
    # (eps1/r^2)^2 + (eps2/r)^2 = 1 with u = r^2 gives u^2 - eps2^2*u - eps1^2 = 0.
    u = 0.5 * (eps2 * eps2 + math.hypot(eps2 * eps2, 2.0 * eps1))
    r = math.sqrt(u)
    return r, eps1 / u, eps2 / r


def chart_P1(eps1: float, eps2: float) -> P1Coords:
    """Directional chart P1 (eps1 = r**2): defined for eps1 > 0."""
    if eps1 <= 0.0:
        raise ChartUndefined(f"chart P1 needs eps1 > 0, got eps1={eps1!r}")
    r = math.sqrt(eps1)
    return P1Coords(r=r, eps2_tilde=eps2 / r)


def chart_P1_inv(coords: P1Coords) -> tuple[float, float]:
    r, eps2_tilde = coords
    return r * r, r * eps2_tilde


def chart_P2(eps1: float, eps2: float) -> P2Coords:
    """Directional chart P2 (eps2 = r): defined for eps2 > 0."""
    if eps2 <= 0.0:
        raise ChartUndefined(f"chart P2 needs eps2 > 0, got eps2={eps2!r}")
    return P2Coords(r=eps2, eps1_tilde=eps1 / (eps2 * eps2))


def chart_P2_inv(coords: P2Coords) -> tuple[float, float]:
    r, eps1_tilde = coords
    return r * r * eps1_tilde, r


def chart_P11(r: float, eps2_tilde: float) -> P11Coords:
    """Secondary chart P11 of P1 (eps2_tilde = s*eps21 with s = r).

    The composite invariant is ``eps21 = eps2/eps1``.
    """
    if r <= 0.0:
        raise ChartUndefined(f"chart P11 needs r > 0, got r={r!r}")
    return P11Coords(s=r, eps21=eps2_tilde / r)


def chart_P11_inv(coords: P11Coords) -> P1Coords:
    s, eps21 = coords
    return P1Coords(r=s, eps2_tilde=s * eps21)


def chart_P12(r: float, eps2_tilde: float) -> P12Coords:
    """Secondary chart P12 of P1 (r = s*r1 with s = eps2_tilde)."""
    if eps2_tilde <= 0.0:
        raise ChartUndefined(f"chart P12 needs eps2_tilde > 0, got {eps2_tilde!r}")
    return P12Coords(s=eps2_tilde, r1=r / eps2_tilde)


def chart_P12_inv(coords: P12Coords) -> P1Coords:
    s, r1 = coords
    return P1Coords(r=s * r1, eps2_tilde=s)
