"""Gap-injection benchmark: inject, impute, score, aggregate, report.

Each eligible series gets a centred gap of every configured size. Every
method imputes it and is scored on the held-out values. Hinge methods run
once per side and also record which family/row was chosen together with the
oracle best/worst candidate over the whole pool.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .baselines import Kind, impute
from .errors import ConfigError, GapfillError, InsufficientDataError
from .hinge import HingeSide, PipelineConfig, hinge_fm2i
from .metrics import MetricRecord, adf_is_stationary, score, smape
from .series import TimeSeries, center_gap, inject_gap

__all__ = [
    "ALL_METHODS",
    "CSV_COLUMNS",
    "BenchmarkConfig",
    "SelectionBounds",
    "RunRecord",
    "Aggregate",
    "BenchmarkReport",
    "run_benchmark",
    "selection_bounds",
    "emit_report",
    "read_report_csv",
    "write_imputations",
    "write_plot_data",
]

logger = logging.getLogger(__name__)

HINGE = "hinge"
BASELINE_METHODS = tuple(k.value for k in Kind)
ALL_METHODS = (HINGE,) + BASELINE_METHODS
CSV_COLUMNS = ("series_id", "method", "side", "gap_size", "smape", "rmse", "mae", "sim", "seconds", "stationary")
AGG_COLUMNS = (
    "method", "side", "gap_size", "stationary", "n", "n_failed",
    "smape", "rmse", "mae", "sim", "seconds_min", "seconds_mean", "seconds_max",
)
METRICS = ("smape", "rmse", "mae", "sim")


def expand_methods(methods: Iterable[str], sides: Iterable[HingeSide | str]) -> tuple[str, ...]:
    """Turn user method names into concrete run names (``hinge`` becomes one per side)."""
    try:
        sides = tuple(HingeSide(s) for s in sides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out: list[str] = []
    for name in methods:
        name = name.strip().lower()
        if name == "all":
            out.extend(expand_methods(ALL_METHODS, sides))
        elif name == HINGE:
            out.extend(f"hinge-{s.value}" for s in sides)
        elif name in ("hinge-left", "hinge-right") or name in BASELINE_METHODS:
            out.append(name)
        else:
            raise ConfigError(f"unknown method {name!r}")
    return tuple(dict.fromkeys(out))


@dataclass(frozen=True)
class BenchmarkConfig:
    gap_sizes: tuple[int, ...] = (5, 10, 20)
    methods: tuple[str, ...] = ALL_METHODS
    sides: tuple[str, ...] = ("left", "right")
    min_length: int = 70
    seed: int = 0  # reserved: every step is deterministic
    output_format: str = "csv"
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    keep_imputations: bool = False
    jobs: int = 1
    run_methods: tuple[str, ...] = field(init=False, default=())

    def __post_init__(self):
        if not self.gap_sizes:
            raise ConfigError("gap_sizes must not be empty")
        for t in self.gap_sizes:
            if int(t) != t or t < 1:
                raise ConfigError(f"gap size must be a positive integer, got {t!r}")
            if t >= self.min_length - 1:
                raise ConfigError(f"gap size {t} must be below min_length - 1 = {self.min_length - 1}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output_format must be csv or json, got {self.output_format!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        object.__setattr__(self, "gap_sizes", tuple(sorted(set(int(t) for t in self.gap_sizes))))
        object.__setattr__(self, "run_methods", expand_methods(self.methods, self.sides))


@dataclass(frozen=True)
class SelectionBounds:
    worst: float
    best: float


def selection_bounds(candidates, truth) -> SelectionBounds:
    """Oracle worst/best gap sMAPE over a candidate pool (rows of ``candidates``)."""
    pool = np.atleast_2d(np.asarray(candidates, dtype=float))
    if pool.shape[0] == 0:
        raise ValueError("candidate pool is empty")
    scores = [smape(truth, row) for row in pool]
    return SelectionBounds(worst=max(scores), best=min(scores))


@dataclass
class RunRecord:
    series_id: str
    method: str
    side: str | None  # None for baselines
    gap_size: int
    metrics: MetricRecord | None
    seconds: float
    stationary: bool | None
    family: int | None = None
    row: int | None = None
    bounds: SelectionBounds | None = None
    error: str | None = None
    truth: np.ndarray | None = field(default=None, repr=False)
    imputed: np.ndarray | None = field(default=None, repr=False)
    series_range: float | None = None

    @property
    def ok(self) -> bool:
        return self.metrics is not None

    def metric(self, name: str) -> float:
        return getattr(self.metrics, name) if self.metrics is not None else math.nan

    def as_dict(self) -> dict:
        d = {
            "series_id": self.series_id,
            "method": self.method,
            "side": self.side,
            "gap_size": self.gap_size,
            **{m: (self.metric(m) if self.ok else None) for m in METRICS},
            "seconds": self.seconds,
            "stationary": self.stationary,
        }
        if self.family is not None:
            d["family"], d["row"] = self.family, self.row
        if self.bounds is not None:
            d["worst_smape"], d["best_smape"] = self.bounds.worst, self.bounds.best
        if self.error is not None:
            d["error"] = self.error
        return d


@dataclass(frozen=True)
class Aggregate:
    method: str
    side: str | None
    gap_size: int
    stationary: bool | None  # None means every series
    n: int
    n_failed: int
    smape: float
    rmse: float
    mae: float
    sim: float
    seconds_min: float
    seconds_mean: float
    seconds_max: float


def _aggregate(rows: Sequence[RunRecord], method: str, side: str | None, gap: int, stationary) -> Aggregate:
    ok = [r for r in rows if r.ok]
    means = {m: (float(np.mean([r.metric(m) for r in ok])) if ok else math.nan) for m in METRICS}
    secs = [r.seconds for r in rows]
    return Aggregate(
        method, side, gap, stationary, len(ok), len(rows) - len(ok),
        seconds_min=min(secs), seconds_mean=float(np.mean(secs)), seconds_max=max(secs), **means,
    )


def aggregate_rows(rows: Sequence[RunRecord]) -> list[Aggregate]:
    """Per (method, gap) aggregates over every series, then split by stationarity."""
    groups: dict[tuple, list[RunRecord]] = {}
    for r in rows:
        groups.setdefault((r.method, r.side, r.gap_size, None), []).append(r)
        if r.stationary is not None:
            groups.setdefault((r.method, r.side, r.gap_size, r.stationary), []).append(r)
    order = {m: i for i, m in enumerate(dict.fromkeys(r.method for r in rows))}
    keys = sorted(groups, key=lambda k: (order[k[0]], k[2], {None: 0, True: 1, False: 2}[k[3]]))
    return [_aggregate(groups[k], *k) for k in keys]


@dataclass
class BenchmarkReport:
    rows: list[RunRecord]
    aggregates: list[Aggregate]

    def aggregate(self, method: str, gap_size: int, stationary: bool | None = None) -> Aggregate:
        for a in self.aggregates:
            if (a.method, a.gap_size, a.stationary) == (method, gap_size, stationary):
                return a
        raise KeyError((method, gap_size, stationary))

    def to_dict(self) -> dict:
        return {
            "rows": [r.as_dict() for r in self.rows],
            "aggregates": [asdict(a) for a in self.aggregates],
        }


def _classify(series: TimeSeries) -> bool | None:
    try:
        return adf_is_stationary(series)
    except InsufficientDataError:
        return None


def _run_one(series: TimeSeries, method: str, gap_size: int, cfg: BenchmarkConfig, stationary) -> RunRecord:
    masked = inject_gap(series, center_gap(len(series), gap_size))
    truth = masked.removed
    side = method.split("-", 1)[1] if method.startswith("hinge-") else None
    rec = RunRecord(series.id, method, side, gap_size, None, 0.0, stationary)
    t0 = time.perf_counter()
    try:
        if side:
            result = hinge_fm2i(masked, side, cfg.pipeline)
            out = result.imputed_series.values
        else:
            out = impute(masked, method).values
    except GapfillError as exc:
        rec.seconds = round(time.perf_counter() - t0, 3)
        rec.error = f"{type(exc).__name__}: {exc}"
        logger.warning("%s failed on %s (gap %d): %s", method, series.id, gap_size, exc)
        return rec
    rec.seconds = round(time.perf_counter() - t0, 3)
    predicted = out[masked.gap.indices]
    present = series.values[~np.isnan(series.values)]
    rec.series_range = float(present.max() - present.min())
    rec.metrics = score(truth, predicted, rec.series_range)
    if side:
        rec.family, rec.row = result.chosen.family, result.chosen.row
        rec.bounds = selection_bounds(result.candidate_gaps(), truth)
    if cfg.keep_imputations:
        rec.truth, rec.imputed = truth.copy(), predicted.copy()
    return rec


def _run_series(series: TimeSeries, cfg: BenchmarkConfig) -> list[RunRecord]:
    stationary = _classify(series)
    return [
        _run_one(series, method, gap, cfg, stationary)
        for method in cfg.run_methods
        for gap in cfg.gap_sizes
    ]


def run_benchmark(dataset: Sequence[TimeSeries], cfg: BenchmarkConfig | None = None) -> BenchmarkReport:
    """Benchmark every configured method on every eligible series and gap size.

    Series shorter than ``cfg.min_length`` or already holding missing values
    are skipped. Method failures become rows without metrics.
    """
    cfg = cfg or BenchmarkConfig()
    eligible = [s for s in dataset if len(s) >= cfg.min_length and not s.has_missing]
    skipped = len(dataset) - len(eligible)
    if skipped:
        logger.info("skipping %d series that are too short or already incomplete", skipped)
    if not eligible:
        raise ConfigError(f"no series with length >= {cfg.min_length} and no missing values")
    ids = [s.id for s in eligible]
    if len(set(ids)) != len(ids):
        raise ConfigError("series ids must be unique")

    if cfg.jobs > 1 and len(eligible) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            per_series = list(pool.map(_run_series, eligible, [cfg] * len(eligible)))
    else:
        per_series = [_run_series(s, cfg) for s in eligible]
    rows = [r for block in per_series for r in block]
    return BenchmarkReport(rows, aggregate_rows(rows))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def emit_report(report: BenchmarkReport, format: str = "csv", destination: IO[str] | None = None) -> str | None:
    """Write rows then aggregates as CSV or JSON.

    The CSV holds the row table first. When there are aggregates, a blank
    line and a second table with its own header follow. With no
    ``destination`` the text is returned.
    """
    buf = destination if destination is not None else io.StringIO()
    if format == "json":
        json.dump(report.to_dict(), buf, indent=2, allow_nan=False, default=_json_default)
        buf.write("\n")
    elif format == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.rows:
            d = r.as_dict()
            w.writerow([_cell(d[c]) for c in CSV_COLUMNS])
        if report.aggregates:
            buf.write("\n")
            w.writerow(AGG_COLUMNS)
            for a in report.aggregates:
                d = asdict(a)
                w.writerow([_cell(d[c]) for c in AGG_COLUMNS])
    else:
        raise ConfigError(f"unknown report format {format!r}")
    return buf.getvalue() if destination is None else None


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _parse_cell(column: str, text: str):
    if text == "":
        return None
    if column in ("gap_size", "n", "n_failed"):
        return int(text)
    if column == "stationary":
        return text == "true"
    if column in ("series_id", "method", "side"):
        return text
    return float(text)


def read_report_csv(source: IO[str] | str) -> tuple[list[dict], list[dict]]:
    """Parse an emitted CSV report back into ``(rows, aggregates)`` dictionaries."""
    text = source if isinstance(source, str) else source.read()
    row_part, _, agg_part = text.partition("\n\n")
    tables = []
    for part in (row_part, agg_part):
        reader = csv.DictReader(io.StringIO(part))
        tables.append([{k: _parse_cell(k, v) for k, v in rec.items()} for rec in reader])
    return tables[0], tables[1]


def write_imputations(report: BenchmarkReport, destination: IO[str]) -> None:
    """Long-form sidecar of held-out truth and imputed values for every scored row."""
    w = csv.writer(destination, lineterminator="\n")
    w.writerow(("series_id", "method", "side", "gap_size", "series_range", "position", "truth", "imputed"))
    for r in report.rows:
        if r.truth is None or r.imputed is None:
            continue
        for i, (t, p) in enumerate(zip(r.truth, r.imputed)):
            w.writerow((r.series_id, r.method, r.side, r.gap_size, repr(r.series_range), i, repr(float(t)), repr(float(p))))


def write_plot_data(report: BenchmarkReport, destination: IO[str]) -> None:
    """Per-run sMAPE in long form, one line per (method, gap, series), for box plots."""
    w = csv.writer(destination, lineterminator="\n")
    w.writerow(("method", "gap_size", "series_id", "stationary", "smape"))
    for r in report.rows:
        if r.ok:
            w.writerow((r.method, r.gap_size, r.series_id, _cell(r.stationary), repr(r.metrics.smape)))
