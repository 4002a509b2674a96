"""Readers for the CSV artifacts produced by the ``robertson`` command line.

Three formats are understood: time-series tables (``t,y,z`` or ``t,x,y,z``),
singular-orbit tables (``segment,kind,chart,c1,c2,c3``), and convergence-study
tables (``r,eps1,eps2,hausdorff_chart,hausdorff_original,error``).  Every
loader validates the header and the cell contents and raises
:class:`CsvFormatError` naming the file and the problem, so callers can turn
bad inputs into clean error messages.
"""

from __future__ import annotations

import csv
import dataclasses
import pathlib

import numpy as np

__all__ = [
    "CsvFormatError",
    "OrbitSegment",
    "OrbitTable",
    "StudyTable",
    "TimeSeries",
    "load_orbit",
    "load_study",
    "load_timeseries",
]

_TIMESERIES_HEADERS = (["t", "y", "z"], ["t", "x", "y", "z"])
_ORBIT_HEADER = ["segment", "kind", "chart", "c1", "c2", "c3"]
_STUDY_HEADER = ["r", "eps1", "eps2", "hausdorff_chart", "hausdorff_original", "error"]


class CsvFormatError(ValueError):
    """A CSV file does not match the expected artifact format."""

    def __init__(self, path: str | pathlib.Path, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason


def _read_rows(path: str | pathlib.Path) -> list[list[str]]:
    with open(path, newline="") as stream:
        rows = list(csv.reader(stream))
    if not rows:
        raise CsvFormatError(path, "file is empty")
    return rows


def _float_cell(path: str | pathlib.Path, row_number: int, name: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(
            path, f"row {row_number}: column {name!r} is not a number: {text!r}"
        ) from None


@dataclasses.dataclass(frozen=True)
class TimeSeries:
    """A sampled trajectory; ``columns`` starts with ``t``."""

    path: str
    columns: tuple[str, ...]
    data: np.ndarray

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(f"{self.path}: no column {name!r}; has {self.columns}")
        return self.data[:, self.columns.index(name)]


def load_timeseries(path: str | pathlib.Path) -> TimeSeries:
    rows = _read_rows(path)
    if rows[0] not in _TIMESERIES_HEADERS:
        expected = " or ".join(",".join(header) for header in _TIMESERIES_HEADERS)
        raise CsvFormatError(path, f"header must be {expected}, got {','.join(rows[0])!r}")
    columns = tuple(rows[0])
    if len(rows) == 1:
        raise CsvFormatError(path, "no data rows")
    data = np.empty((len(rows) - 1, len(columns)))
    for offset, row in enumerate(rows[1:], start=2):
        if len(row) != len(columns):
            raise CsvFormatError(path, f"row {offset}: expected {len(columns)} cells, got {len(row)}")
        data[offset - 2] = [
            _float_cell(path, offset, name, cell) for name, cell in zip(columns, row)
        ]
    return TimeSeries(path=str(path), columns=columns, data=data)


@dataclasses.dataclass(frozen=True)
class OrbitSegment:
    """One polyline of a singular orbit, in the chart it was exported from."""

    index: int
    kind: str
    chart: str
    points: np.ndarray


@dataclasses.dataclass(frozen=True)
class OrbitTable:
    path: str
    segments: tuple[OrbitSegment, ...]


def load_orbit(path: str | pathlib.Path) -> OrbitTable:
    rows = _read_rows(path)
    if rows[0] != _ORBIT_HEADER:
        raise CsvFormatError(
            path, f"header must be {','.join(_ORBIT_HEADER)}, got {','.join(rows[0])!r}"
        )
    if len(rows) == 1:
        raise CsvFormatError(path, "no data rows")
    segments: list[OrbitSegment] = []
    current: tuple[int, str, str] | None = None
    points: list[list[float]] = []

    def flush() -> None:
        if current is not None:
            segments.append(
                OrbitSegment(
                    index=current[0],
                    kind=current[1],
                    chart=current[2],
                    points=np.asarray(points),
                )
            )

    for offset, row in enumerate(rows[1:], start=2):
        if len(row) != len(_ORBIT_HEADER):
            raise CsvFormatError(path, f"row {offset}: expected 6 cells, got {len(row)}")
        try:
            index = int(row[0])
        except ValueError:
            raise CsvFormatError(path, f"row {offset}: bad segment index {row[0]!r}") from None
        coords = [_float_cell(path, offset, name, cell)
                  for name, cell in zip(("c1", "c2"), row[3:5])]
        if row[5] != "":
            coords.append(_float_cell(path, offset, "c3", row[5]))
        key = (index, row[1], row[2])
        if key != current:
            flush()
            current, points = key, []
        if points and len(points[0]) != len(coords):
            raise CsvFormatError(path, f"row {offset}: segment mixes 2- and 3-coordinate rows")
        points.append(coords)
    flush()
    return OrbitTable(path=str(path), segments=tuple(segments))


@dataclasses.dataclass(frozen=True)
class StudyTable:
    """Valid rows of a convergence study; failed radii are only counted."""

    path: str
    r: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray
    chart_distance: np.ndarray
    original_distance: np.ndarray
    dropped: int


def load_study(path: str | pathlib.Path) -> StudyTable:
    rows = _read_rows(path)
    if rows[0] != _STUDY_HEADER:
        raise CsvFormatError(
            path, f"header must be {','.join(_STUDY_HEADER)}, got {','.join(rows[0])!r}"
        )
    kept: list[list[float]] = []
    dropped = 0
    for offset, row in enumerate(rows[1:], start=2):
        if len(row) != len(_STUDY_HEADER):
            raise CsvFormatError(path, f"row {offset}: expected 6 cells, got {len(row)}")
        if row[5] != "" or row[3] == "" or row[4] == "":
            dropped += 1
            continue
        kept.append(
            [_float_cell(path, offset, name, cell)
             for name, cell in zip(_STUDY_HEADER[:5], row[:5])]
        )
    if not kept:
        raise CsvFormatError(path, "no valid data rows")
    table = np.asarray(kept)
    return StudyTable(
        path=str(path),
        r=table[:, 0],
        eps1=table[:, 1],
        eps2=table[:, 2],
        chart_distance=table[:, 3],
        original_distance=table[:, 4],
        dropped=dropped,
    )
