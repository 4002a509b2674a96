"""Figure rendering for Robertson-model CSV artifacts.

This package is a pure view layer: it reads the CSV files written by the
``robertson`` command line and turns them into PNG/SVG figures.  It never
recomputes any dynamics, so the figures always reflect the artifacts on disk.
"""

from .figures import KINDS, PlotSpec, RenderResult, SpecError, render
from .io import (
    CsvFormatError,
    OrbitSegment,
    OrbitTable,
    StudyTable,
    TimeSeries,
    load_orbit,
    load_study,
    load_timeseries,
)

__all__ = [
    "CsvFormatError",
    "KINDS",
    "OrbitSegment",
    "OrbitTable",
    "PlotSpec",
    "RenderResult",
    "SpecError",
    "StudyTable",
    "TimeSeries",
    "load_orbit",
    "load_study",
    "load_timeseries",
    "render",
]
