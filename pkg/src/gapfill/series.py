"""Univariate series model, CSV ingestion, gap injection and min-max scaling.

Missing observations are stored as ``NaN`` inside a float64 array. Infinite
values are never accepted as present observations.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyInputError,
    GapRangeError,
    InsufficientDataError,
    ParseError,
    UnsupportedInputError,
)

__all__ = [
    "Period",
    "Layout",
    "TimeSeries",
    "GapSpec",
    "MaskedSeries",
    "ScaleParams",
    "load_csv",
    "write_csv",
    "inject_gap",
    "center_gap",
    "find_single_gap",
    "minmax_scale",
    "minmax_unscale",
]


class Period(str, Enum):
    YEARLY = "yearly"
    QUARTERLY = "quarterly"
    MONTHLY = "monthly"
    OTHER = "other"

    @classmethod
    def parse(cls, text: str) -> "Period":
        try:
            return cls(text.strip().lower())
        except ValueError:
            return cls.OTHER


class Layout(str, Enum):
    ONE_SERIES_PER_ROW = "one_series_per_row"
    TWO_COLUMN = "two_column"


def _frozen(values: Iterable[float | None]) -> np.ndarray:
    arr = np.array([np.nan if v is None else v for v in values], dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Unit-spaced univariate series; ``NaN`` marks an absent observation."""

    id: str
    values: np.ndarray
    period: Period = Period.OTHER

    def __post_init__(self):
        vals = self.values
        if not (isinstance(vals, np.ndarray) and vals.dtype == np.float64 and not vals.flags.writeable):
            vals = _frozen(np.asarray(vals, dtype=np.float64).ravel())
            object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 1:
            raise UnsupportedInputError(f"series {self.id!r} must hold at least one value")
        if np.isinf(vals).any():
            raise UnsupportedInputError(f"series {self.id!r} contains infinite values")
        if not isinstance(self.period, Period):
            object.__setattr__(self, "period", Period.parse(str(self.period)))

    def __len__(self) -> int:
        return self.values.size

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def has_missing(self) -> bool:
        return bool(self.missing.any())

    def with_values(self, values: Sequence[float] | np.ndarray) -> "TimeSeries":
        return TimeSeries(self.id, np.asarray(values, dtype=np.float64), self.period)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.id == other.id
            and self.period == other.period
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def __repr__(self) -> str:
        return f"TimeSeries(id={self.id!r}, period={self.period.value}, L={len(self)})"


@dataclass(frozen=True)
class GapSpec:
    """Contiguous gap of ``size`` observations starting at index ``start``."""

    start: int
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise GapRangeError(f"gap size must be positive, got {self.size}")
        if self.start < 0:
            raise GapRangeError(f"gap start must be non-negative, got {self.start}")

    @property
    def stop(self) -> int:
        """Index one past the last gap position."""
        return self.start + self.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop)

    def check_bounds(self, length: int) -> None:
        # one observed point must remain on each side so that both hinges exist
        if self.start < 1 or self.stop > length - 1:
            raise GapRangeError(
                f"gap [{self.start}, {self.stop}) needs an observation on both sides "
                f"within a series of length {length}"
            )

    def missing_rate(self, length: int) -> float:
        return self.size / length


def center_gap(length: int, size: int) -> GapSpec:
    """Deterministic benchmark placement: ``start = (length - size) // 2``."""
    gap = GapSpec((length - size) // 2, size)
    gap.check_bounds(length)
    return gap


@dataclass(frozen=True, eq=False)
class MaskedSeries:
    """A series carrying one contiguous gap plus the held-out truth (if known)."""

    base: TimeSeries
    gap: GapSpec
    removed: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        removed = np.asarray(self.removed, dtype=np.float64).ravel().copy()
        removed.setflags(write=False)
        object.__setattr__(self, "removed", removed)
        self.gap.check_bounds(len(self.base))
        if not self.base.missing[self.gap.start : self.gap.stop].all():
            raise UnsupportedInputError("gap positions must all be absent in the base series")
        if removed.size not in (0, self.gap.size):
            raise UnsupportedInputError(
                f"removed holds {removed.size} values for a gap of size {self.gap.size}"
            )

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def __len__(self) -> int:
        return len(self.base)

    def restore(self) -> TimeSeries:
        """Put the held-out values back, reproducing the original series."""
        if self.removed.size == 0:
            raise UnsupportedInputError("no held-out values to restore")
        vals = self.base.values.copy()
        vals[self.gap.start : self.gap.stop] = self.removed
        return self.base.with_values(vals)

    def fill(self, estimates: Sequence[float] | np.ndarray) -> TimeSeries:
        """Return the base series with the gap replaced by ``estimates``."""
        est = np.asarray(estimates, dtype=np.float64)
        if est.shape != (self.gap.size,):
            raise UnsupportedInputError(f"expected {self.gap.size} estimates, got {est.shape}")
        vals = self.base.values.copy()
        vals[self.gap.start : self.gap.stop] = est
        return self.base.with_values(vals)


@dataclass(frozen=True)
class ScaleParams:
    min: float
    max: float

    def __post_init__(self):
        if not self.max >= self.min:
            raise ValueError(f"max ({self.max}) < min ({self.min})")

    @property
    def degenerate(self) -> bool:
        return self.max == self.min

    @property
    def range(self) -> float:
        return self.max - self.min


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

_MISSING_TOKENS = {"", "nan"}


def _parse_cell(cell: str, row: int, column: int) -> float | None:
    text = cell.strip()
    if text.lower() in _MISSING_TOKENS:
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"malformed number {text!r}", row=row, column=column) from None
    if math.isnan(value):
        return None
    if math.isinf(value):
        raise ParseError(f"non-finite number {text!r}", row=row, column=column)
    return value


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _as_text(source: IO | bytes | str) -> IO[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def load_csv(
    source: IO | bytes | str,
    layout: Layout | str = Layout.ONE_SERIES_PER_ROW,
    series_id: str = "series",
) -> list[TimeSeries]:
    """Parse series from CSV text.

    ``one_series_per_row`` rows are ``id,period,v1,v2,...``; ``two_column``
    holds a single series as ``index,value`` rows. An optional header row is
    skipped in both layouts. Empty cells and ``NaN`` (any case) are missing.

    Rows and columns in error messages are 1-based.
    """
    layout = Layout(layout)
    reader = csv.reader(_as_text(source))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if any(c.strip() for c in r)]

    if layout is Layout.ONE_SERIES_PER_ROW:
        if rows and rows[0][1][0].strip().lower() == "id":
            rows = rows[1:]
        if not rows:
            raise EmptyInputError("no data rows")
        out = []
        for n, row in rows:
            if len(row) < 3:
                raise ParseError("expected id,period and at least one value", row=n)
            values = [_parse_cell(c, n, col) for col, c in enumerate(row[2:], start=3)]
            # trailing empty cells pad ragged exports; they are not observations
            while values and values[-1] is None and not row[1 + len(values)].strip():
                values.pop()
            if not values:
                raise ParseError("series has no values", row=n)
            out.append(TimeSeries(row[0].strip(), _frozen(values), Period.parse(row[1])))
        return out

    if rows and len(rows[0][1]) >= 2 and not _is_number(rows[0][1][1]) and rows[0][1][1].strip().lower() not in _MISSING_TOKENS:
        rows = rows[1:]
    if not rows:
        raise EmptyInputError("no data rows")
    values = []
    for n, row in rows:
        if len(row) < 2:
            raise ParseError("expected index,value", row=n)
        values.append(_parse_cell(row[1], n, 2))
    return [TimeSeries(series_id, _frozen(values))]


def _fmt(value: float) -> str:
    # repr gives the shortest string that round-trips to the same float64
    return "" if math.isnan(value) else repr(float(value))


def write_csv(
    series: Sequence[TimeSeries],
    destination: IO[str],
    layout: Layout | str = Layout.ONE_SERIES_PER_ROW,
) -> None:
    layout = Layout(layout)
    writer = csv.writer(destination, lineterminator="\n")
    if layout is Layout.ONE_SERIES_PER_ROW:
        for s in series:
            writer.writerow([s.id, s.period.value, *(_fmt(v) for v in s.values)])
        return
    if len(series) != 1:
        raise UnsupportedInputError("two_column layout holds exactly one series")
    writer.writerow(["index", "value"])
    for i, v in enumerate(series[0].values):
        writer.writerow([i, _fmt(v)])


# ---------------------------------------------------------------------------
# Gaps
# ---------------------------------------------------------------------------


def inject_gap(series: TimeSeries, gap: GapSpec) -> MaskedSeries:
    """Remove ``gap.size`` observations from a complete series, keeping them as truth."""
    if series.has_missing:
        raise UnsupportedInputError(f"series {series.id!r} already contains missing values")
    gap.check_bounds(len(series))
    vals = series.values.copy()
    removed = vals[gap.start : gap.stop].copy()
    vals[gap.start : gap.stop] = np.nan
    return MaskedSeries(series.with_values(vals), gap, removed)


def find_single_gap(series: TimeSeries) -> MaskedSeries:
    """Wrap a series whose missing values form exactly one interior run."""
    idx = np.flatnonzero(series.missing)
    if idx.size == 0:
        raise UnsupportedInputError(f"series {series.id!r} has no missing values")
    if idx[-1] - idx[0] + 1 != idx.size:
        raise UnsupportedInputError(f"series {series.id!r} has more than one gap")
    return MaskedSeries(series, GapSpec(int(idx[0]), int(idx.size)))


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------


def minmax_scale(series: MaskedSeries) -> tuple[MaskedSeries, ScaleParams]:
    """Map present values onto [0, 1]; a constant series maps to 0.5."""
    vals = series.values
    present = vals[~np.isnan(vals)]
    if present.size < 2:
        raise InsufficientDataError("min-max scaling needs at least two present values")
    params = ScaleParams(float(present.min()), float(present.max()))
    if params.degenerate:
        scaled = np.where(np.isnan(vals), np.nan, 0.5)
    else:
        scaled = np.clip((vals - params.min) / params.range, 0.0, 1.0)
    removed = series.removed
    if removed.size and not params.degenerate:
        removed = (removed - params.min) / params.range
    elif removed.size:
        removed = np.full_like(removed, 0.5)
    return MaskedSeries(series.base.with_values(scaled), series.gap, removed), params


def minmax_unscale(scaled: Sequence[float] | np.ndarray, params: ScaleParams) -> np.ndarray:
    scaled = np.asarray(scaled, dtype=np.float64)
    if params.degenerate:
        return np.where(np.isnan(scaled), np.nan, params.min)
    return scaled * params.range + params.min
