"""Deterministic figure rendering for Robertson-model CSV artifacts.

Five figure kinds are supported, each a pure view over CSV files written by
the ``robertson`` command line:

- ``timeseries``: state components against time (log-log), y peak annotated;
- ``phaseplane``: a singular orbit's polylines, optionally overlaid with a
  genuine trajectory rescaled into the same chart;
- ``wedge``: the parameter-plane regions with regime boundary curves and the
  parameter paths of one or more convergence studies;
- ``fourpanel``: a 2x2 grid of time series, one per parameter regime;
- ``convergence``: log-log distance-versus-radius points with fitted slopes.

Rendering is deterministic: the backend is Agg, styles are fixed, and no
timestamps are written into PNG or SVG output.
"""

from __future__ import annotations

import dataclasses
import pathlib
from typing import Callable, Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import StudyTable, load_orbit, load_study, load_timeseries

__all__ = ["KINDS", "PlotSpec", "RenderResult", "SpecError", "render"]

KINDS = ("timeseries", "phaseplane", "wedge", "fourpanel", "convergence")

_SEGMENT_COLORS = {"fast": "tab:blue", "slow": "tab:green", "center": "tab:purple"}
_OVERLAY_COLOR = "tab:red"

plt.rcParams["svg.hashsalt"] = "robertson-plots"


class SpecError(ValueError):
    """The plot specification itself is invalid (before any CSV is read)."""


@dataclasses.dataclass(frozen=True)
class PlotSpec:
    """What to draw: figure kind, input CSV paths, output image path.

    ``params`` carries kind-specific numbers, e.g. ``overlay_x_scale`` /
    ``overlay_y_scale`` for ``phaseplane`` (how to map an original-variable
    trajectory into chart coordinates) and ``beta1``/``beta2``/``beta3`` for
    the ``wedge`` boundary curves.
    """

    kind: str
    inputs: tuple[str, ...]
    out: str
    title: str | None = None
    params: Mapping[str, float] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SpecError("at least one input CSV is required")
        suffix = pathlib.Path(self.out).suffix.lower()
        if suffix not in (".png", ".svg"):
            raise SpecError(f"output must end in .png or .svg, got {self.out!r}")


@dataclasses.dataclass(frozen=True)
class RenderResult:
    """Where the image landed plus the numbers drawn onto it."""

    path: str
    annotations: Mapping[str, float]


def _require_inputs(spec: PlotSpec, low: int, high: int) -> None:
    if not low <= len(spec.inputs) <= high:
        expected = str(low) if low == high else f"{low} to {high}"
        raise SpecError(
            f"{spec.kind} needs {expected} input file(s), got {len(spec.inputs)}"
        )


def _save(figure: plt.Figure, out: str) -> None:
    if pathlib.Path(out).suffix.lower() == ".svg":
        figure.savefig(out, metadata={"Date": None})
    else:
        figure.savefig(out, metadata={"Software": "robertson-plots"})
    plt.close(figure)


def _loglog_series(ax: plt.Axes, t: np.ndarray, values: np.ndarray, **kwargs) -> None:
    mask = (t > 0.0) & (values > 0.0)
    ax.loglog(t[mask], values[mask], **kwargs)


def _annotate_peak(ax: plt.Axes, t: np.ndarray, y: np.ndarray, fontsize: float = 9.0) -> float:
    peak_index = int(np.argmax(y))
    y_peak = float(y[peak_index])
    ax.plot([t[peak_index]], [y_peak], marker="o", markersize=4, color="black", zorder=5)
    ax.annotate(
        f"y_max = {y_peak:.6e}",
        xy=(t[peak_index], y_peak),
        xytext=(8, 10),
        textcoords="offset points",
        fontsize=fontsize,
    )
    return y_peak


def _render_timeseries(spec: PlotSpec) -> tuple[plt.Figure, dict[str, float]]:
    _require_inputs(spec, 1, 1)
    series = load_timeseries(spec.inputs[0])
    t = series.column("t")
    figure, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in series.columns[1:]:
        _loglog_series(ax, t, series.column(name), label=name, linewidth=1.4)
    y = series.column("y")
    y_peak = _annotate_peak(ax, t, y)
    ax.set_xlabel("t")
    ax.set_ylabel("state")
    ax.set_title(spec.title or pathlib.Path(spec.inputs[0]).stem)
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, which="both", alpha=0.25)
    figure.tight_layout()
    return figure, {"y_peak": y_peak, "t_peak": float(t[int(np.argmax(y))])}


def _render_phaseplane(spec: PlotSpec) -> tuple[plt.Figure, dict[str, float]]:
    _require_inputs(spec, 1, 2)
    orbit = load_orbit(spec.inputs[0])
    chart = orbit.segments[0].chart
    figure, ax = plt.subplots(figsize=(6.0, 5.0))
    plotted = skipped = 0
    labelled: set[str] = set()
    for segment in orbit.segments:
        if segment.chart != chart or segment.points.shape[1] != 2:
            skipped += 1
            continue
        label = None if segment.kind in labelled else segment.kind
        labelled.add(segment.kind)
        ax.plot(
            segment.points[:, 0],
            segment.points[:, 1],
            color=_SEGMENT_COLORS.get(segment.kind, "tab:gray"),
            linewidth=2.0,
            label=label,
        )
        plotted += 1
    if len(spec.inputs) == 2:
        series = load_timeseries(spec.inputs[1])
        x_scale = float(spec.params.get("overlay_x_scale", 1.0))
        y_scale = float(spec.params.get("overlay_y_scale", 1.0))
        ax.plot(
            series.column("y") * x_scale,
            series.column("z") * y_scale,
            color=_OVERLAY_COLOR,
            linewidth=1.0,
            label="genuine",
        )
    ax.set_xlabel(f"{chart} coordinate 1")
    ax.set_ylabel(f"{chart} coordinate 2")
    ax.set_title(spec.title or f"singular orbit in chart {chart}")
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.25)
    figure.tight_layout()
    return figure, {"segments": float(plotted), "skipped_segments": float(skipped)}


def _render_wedge(spec: PlotSpec) -> tuple[plt.Figure, dict[str, float]]:
    _require_inputs(spec, 1, 16)
    beta1 = float(spec.params.get("beta1", 1.0))
    beta2 = float(spec.params.get("beta2", 1.0))
    beta3 = float(spec.params.get("beta3", 1e-3))
    figure, ax = plt.subplots(figsize=(6.0, 5.0))
    eps2 = np.geomspace(1e-6, 1.0, 256)
    ax.loglog(eps2, beta1 * eps2, "--", color="black", linewidth=1.0,
              label="line eps1 = b1*eps2")
    ax.loglog(eps2, beta2 * eps2**2, "-.", color="dimgray", linewidth=1.0,
              label="parabola eps1 = b2*eps2^2")
    ax.loglog(eps2, beta3 * eps2**2, ":", color="darkgray", linewidth=1.0,
              label="parabola eps1 = b3*eps2^2")
    for path in spec.inputs:
        study = load_study(path)
        ax.loglog(study.eps2, study.eps1, marker="o", markersize=4, linewidth=1.2,
                  label=pathlib.Path(path).stem)
    ax.set_xlabel("eps2")
    ax.set_ylabel("eps1")
    ax.set_title(spec.title or "parameter wedge and study paths")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    figure.tight_layout()
    return figure, {"paths": float(len(spec.inputs))}


def _render_fourpanel(spec: PlotSpec) -> tuple[plt.Figure, dict[str, float]]:
    _require_inputs(spec, 4, 4)
    figure, axes = plt.subplots(2, 2, figsize=(9.5, 7.0))
    annotations: dict[str, float] = {}
    for position, (ax, path) in enumerate(zip(axes.flat, spec.inputs)):
        series = load_timeseries(path)
        t = series.column("t")
        for name in series.columns[1:]:
            _loglog_series(ax, t, series.column(name), label=name, linewidth=1.2)
        annotations[f"y_peak_{position}"] = _annotate_peak(
            ax, t, series.column("y"), fontsize=8.0
        )
        ax.set_title(pathlib.Path(path).stem, fontsize=10)
        ax.set_xlabel("t", fontsize=9)
        ax.legend(loc="lower left", fontsize=8)
        ax.grid(True, which="both", alpha=0.25)
    if spec.title:
        figure.suptitle(spec.title)
    figure.tight_layout()
    return figure, annotations


def _fit_slope(study: StudyTable) -> tuple[float, float]:
    if study.r.size < 2:
        raise SpecError(f"{study.path}: need at least two valid rows to fit a slope")
    coeffs = np.polynomial.polynomial.polyfit(
        np.log(study.r), np.log(study.chart_distance), 1
    )
    return float(coeffs[1]), float(coeffs[0])


def _render_convergence(spec: PlotSpec) -> tuple[plt.Figure, dict[str, float]]:
    _require_inputs(spec, 1, 16)
    figure, ax = plt.subplots(figsize=(6.5, 5.0))
    annotations: dict[str, float] = {}
    for position, path in enumerate(spec.inputs):
        study = load_study(path)
        slope, intercept = _fit_slope(study)
        stem = pathlib.Path(path).stem
        line = ax.loglog(
            study.r, study.chart_distance, "o", markersize=5,
            label=f"{stem}: slope {slope:.3f}",
        )[0]
        fit_r = np.geomspace(study.r.min(), study.r.max(), 32)
        ax.loglog(
            fit_r, np.exp(intercept) * fit_r**slope,
            "-", linewidth=1.0, color=line.get_color(), alpha=0.7,
        )
        annotations[f"slope_{position}_{stem}"] = slope
    ax.set_xlabel("radius r")
    ax.set_ylabel("chart-space Hausdorff distance")
    ax.set_title(spec.title or "convergence of the singular approximation")
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, which="both", alpha=0.25)
    figure.tight_layout()
    return figure, annotations


_RENDERERS: dict[str, Callable[[PlotSpec], tuple[plt.Figure, dict[str, float]]]] = {
    "timeseries": _render_timeseries,
    "phaseplane": _render_phaseplane,
    "wedge": _render_wedge,
    "fourpanel": _render_fourpanel,
    "convergence": _render_convergence,
}


def render(spec: PlotSpec) -> RenderResult:
    """Draw the figure described by ``spec`` and write it to ``spec.out``."""
    figure, annotations = _RENDERERS[spec.kind](spec)
    _save(figure, spec.out)
    return RenderResult(path=spec.out, annotations=annotations)
