"""Accuracy metrics over imputed gap positions and an ADF stationarity check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, UnsupportedInputError
from .series import TimeSeries

__all__ = [
    "ADF_CRITICAL_5PCT",
    "MetricRecord",
    "smape",
    "rmse",
    "mae",
    "sim",
    "score",
    "adf_statistic",
    "adf_is_stationary",
]

# MacKinnon asymptotic 5% critical value, constant-only regression
ADF_CRITICAL_5PCT = -2.86


def _pair(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=np.float64).ravel()
    f = np.asarray(predicted, dtype=np.float64).ravel()
    if a.shape != f.shape:
        raise ValueError(f"length mismatch: {a.size} actual vs {f.size} predicted")
    if a.size == 0:
        raise ValueError("metrics need at least one point")
    return a, f


def smape(actual, predicted) -> float:
    """Symmetric MAPE in percent, bounded in [0, 200]; a 0/0 term counts as 0."""
    a, f = _pair(actual, predicted)
    num = 2.0 * np.abs(f - a)
    den = np.abs(a) + np.abs(f)
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(100.0 * terms.mean())


def rmse(actual, predicted) -> float:
    a, f = _pair(actual, predicted)
    return float(np.sqrt(np.mean((f - a) ** 2)))


def mae(actual, predicted) -> float:
    a, f = _pair(actual, predicted)
    return float(np.mean(np.abs(f - a)))


def sim(actual, predicted, series_range: float) -> float:
    """Mean of ``1 / (1 + |F - A| / range)``.

    A zero range gives 1 for a perfect match and otherwise falls back to a
    unit range.
    """
    a, f = _pair(actual, predicted)
    diff = np.abs(f - a)
    if not series_range > 0:
        if not diff.any():
            return 1.0
        series_range = 1.0
    return float(np.mean(1.0 / (1.0 + diff / series_range)))


@dataclass(frozen=True)
class MetricRecord:
    smape: float
    rmse: float
    mae: float
    sim: float


def score(actual, predicted, series_range: float) -> MetricRecord:
    return MetricRecord(
        smape(actual, predicted),
        rmse(actual, predicted),
        mae(actual, predicted),
        sim(actual, predicted, series_range),
    )


def adf_statistic(values, lags: int | None = None) -> float:
    """t-statistic on the lagged level in the constant-only ADF regression.

    ``lags`` defaults to ``floor((L - 1) ** (1/3))``. Returns ``nan`` when the
    regression fits exactly with a non-negative level coefficient, and
    ``-inf`` for an exact fit that is strictly mean-reverting.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if lags is None:
        lags = int(math.floor((n - 1) ** (1.0 / 3.0) + 1e-12))
    dx = np.diff(x)
    rows = dx.size - lags
    if rows <= lags + 2:
        raise InsufficientDataError(f"series of length {n} too short for {lags} lags")
    y = dx[lags:]
    cols = [np.ones(rows), x[lags:-1]]
    cols += [dx[lags - i : dx.size - i] for i in range(1, lags + 1)]
    X = np.column_stack(cols)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    dof = rows - X.shape[1]
    sigma2 = resid @ resid / dof
    xtx_inv = np.linalg.pinv(X.T @ X)
    se = math.sqrt(max(sigma2 * xtx_inv[1, 1], 0.0))
    scale = max(np.abs(y).max(), 1.0)
    if se <= 1e-12 * scale:
        return float("-inf") if beta[1] < -1e-9 else float("nan")
    return float(beta[1] / se)


def adf_is_stationary(series: TimeSeries | np.ndarray, alpha: float = 0.05) -> bool:
    """True when the unit-root null is rejected at the 5% level."""
    if alpha != 0.05:
        raise ValueError("only the 5% level is supported")
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=np.float64)
    if np.isnan(values).any():
        raise UnsupportedInputError("ADF test requires a complete series")
    if values.size < 20:
        raise InsufficientDataError(f"ADF test needs at least 20 points, got {values.size}")
    stat = adf_statistic(values)
    return bool(stat < ADF_CRITICAL_5PCT)
