"""Robertson reaction kinetics and its two-parameter reduced form.

The full model tracks three concentrations (x, y, z) driven by rate constants
(k1, k2, k3):

    x' = -k1*x + k3*y*z
    y' =  k1*x - k2*y**2 - k3*y*z
    z' =  k2*y**2

Dividing out k2 and eliminating x through the conserved total c = x + y + z
gives the planar fast-time system in the small parameters eps1 = k1/k2 and
eps2 = k3/k2:

    y' = eps1*(c - y - z) - y**2 - eps2*y*z
    z' = y**2

Everything here is dimensionless and uses plain double precision.  Negative
concentrations of round-off size (|value| <= 1e-12) are tolerated by design;
clamping, if any, happens in reporting code, never here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "RateConstants",
    "ScaledParams",
    "FullState",
    "ReducedState",
    "CLASSICAL_RATES",
    "CLASSICAL_INITIAL",
    "full_rhs",
    "full_jacobian",
    "reduce_model",
    "reduced_rhs",
    "reduced_jacobian",
    "equilibrium",
    "conserved_quantity",
]


@dataclass(frozen=True)
class RateConstants:
    """Positive rate constants (k1, k2, k3) of the full reaction."""

    k1: float
    k2: float
    k3: float

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class ScaledParams:
    """Parameters (eps1, eps2, c) of the reduced planar system.

    eps1 and eps2 are the dimensionless rate ratios k1/k2 and k3/k2; c is the
    conserved total concentration, strictly positive.
    """

    eps1: float
    eps2: float
    c: float

    def __post_init__(self) -> None:
        if self.eps1 < 0.0 or self.eps2 < 0.0:
            raise ValueError(
                f"eps1 and eps2 must be non-negative, got ({self.eps1!r}, {self.eps2!r})"
            )
        if not self.c > 0.0:
            raise ValueError(f"c must be positive, got {self.c!r}")


class FullState(NamedTuple):
    """Concentrations of the full three-species model."""

    x: float
    y: float
    z: float


class ReducedState(NamedTuple):
    """State of the planar reduced system."""

    y: float
    z: float


#: The classical stiff benchmark parameterization.
CLASSICAL_RATES = RateConstants(k1=4e-2, k2=3e7, k3=1e4)

#: The classical initial condition: all mass in the first species.
CLASSICAL_INITIAL = FullState(x=1.0, y=0.0, z=0.0)


def full_rhs(state: FullState | np.ndarray, rates: RateConstants) -> np.ndarray:
    """Time derivative of the full model; components sum to zero exactly.

    The middle component is assembled as ``-(x' + z')``, so the identity
    ``(dx + dz) + dy == 0.0`` holds in floating point (not merely to
    round-off), which is what keeps x + y + z conserved under integration.
    """
    x, y, z = np.asarray(state, dtype=float)
    dx = -rates.k1 * x + rates.k3 * y * z
    dz = rates.k2 * y * y
    dy = -(dx + dz)
    return np.array([dx, dy, dz])


def full_jacobian(state: FullState | np.ndarray, rates: RateConstants) -> np.ndarray:
    """Jacobian of :func:`full_rhs`; every column sums to zero exactly."""
    _, y, z = np.asarray(state, dtype=float)
    row_x = np.array([-rates.k1, rates.k3 * z, rates.k3 * y])
    row_z = np.array([0.0, 2.0 * rates.k2 * y, 0.0])
    row_y = -(row_x + row_z)
    return np.array([row_x, row_y, row_z])


def reduce_model(
    rates: RateConstants, initial: FullState | np.ndarray
) -> tuple[ScaledParams, ReducedState]:
    """Map rate constants and an initial condition to the reduced system.

    Returns the scaled parameters (eps1, eps2, c) with c the conserved total
    of the initial condition, and the matching planar initial state (y, z).
    """
    x, y, z = np.asarray(initial, dtype=float)
    params = ScaledParams(eps1=rates.k1 / rates.k2, eps2=rates.k3 / rates.k2, c=x + y + z)
    return params, ReducedState(y=float(y), z=float(z))


def reduced_rhs(state: ReducedState | np.ndarray, params: ScaledParams) -> np.ndarray:
    """Fast-time derivative of the planar reduced system."""
    y, z = np.asarray(state, dtype=float)
    dy = params.eps1 * (params.c - y - z) - y * y - params.eps2 * y * z
    dz = y * y
    return np.array([dy, dz])


def reduced_jacobian(state: ReducedState | np.ndarray, params: ScaledParams) -> np.ndarray:
    """Jacobian of :func:`reduced_rhs` with respect to (y, z)."""
    y, z = np.asarray(state, dtype=float)
    return np.array(
        [
            [-params.eps1 - 2.0 * y - params.eps2 * z, -params.eps1 - params.eps2 * y],
            [2.0 * y, 0.0],
        ]
    )


def equilibrium(params: ScaledParams) -> tuple[ReducedState, np.ndarray]:
    """Unique equilibrium (0, c) of the reduced system and its eigenvalues.

    The linearization at the equilibrium is upper triangular, so the
    eigenvalues (-eps1 - eps2*c, 0) are exact.
    """
    state = ReducedState(y=0.0, z=params.c)
    eigenvalues = np.array([-params.eps1 - params.eps2 * params.c, 0.0])
    return state, eigenvalues


def conserved_quantity(state: FullState | np.ndarray) -> float:
    """Total concentration x + y + z, invariant under the full flow."""
    x, y, z = np.asarray(state, dtype=float)
    return float(x + y + z)
