"""Reference imputers: constant statistics, carrying, interpolation, KNN and AR.

Every imputer takes a :class:`~gapfill.series.MaskedSeries` and returns a
complete :class:`~gapfill.series.TimeSeries` equal to the input outside the
gap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InsufficientDataError
from .metrics import adf_is_stationary
from .series import MaskedSeries, TimeSeries

__all__ = [
    "Kind",
    "BaselineMethod",
    "impute_constant",
    "impute_carry",
    "impute_linear",
    "impute_spline",
    "impute_knn",
    "impute_arima",
    "impute",
    "KNN_GRID",
]

logger = logging.getLogger(__name__)

KNN_GRID = (1, 3, 5, 7)


class Kind(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"
    LOCF = "locf"
    NOCB = "nocb"
    LINEAR = "linear"
    SPLINE = "spline"
    KNN = "knn"
    ARIMA = "arima"


@dataclass(frozen=True)
class BaselineMethod:
    kind: Kind = Kind.LINEAR
    knn_k: int | None = None
    knn_window: int = 4
    arima_max_p: int = 5

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.knn_k is not None and self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")
        if self.knn_window < 1:
            raise ValueError("knn_window must be >= 1")


def _fill(masked: MaskedSeries, estimates) -> TimeSeries:
    """Fill every absent position (the gap, in practice) with ``estimates``."""
    vals = masked.values.copy()
    missing = np.isnan(vals)
    vals[missing] = estimates
    return masked.base.with_values(vals)


def impute_constant(masked: MaskedSeries, statistic: str = "mean") -> TimeSeries:
    present = masked.values[~np.isnan(masked.values)]
    if present.size == 0:
        raise InsufficientDataError("no present values")
    if statistic == "mean":
        value = present.mean()
    elif statistic == "median":
        value = np.median(present)
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    return _fill(masked, value)


def impute_carry(masked: MaskedSeries, direction: str = "forward") -> TimeSeries:
    """LOCF (``forward``) or NOCB (``backward``) over the gap."""
    g = masked.gap
    if direction == "forward":
        value = masked.values[g.start - 1]
    elif direction == "backward":
        value = masked.values[g.stop]
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return masked.fill(np.full(g.size, value))


def impute_linear(masked: MaskedSeries) -> TimeSeries:
    g = masked.gap
    left, right = masked.values[g.start - 1], masked.values[g.stop]
    frac = np.arange(1, g.size + 1) / (g.size + 1)
    return masked.fill(left + (right - left) * frac)


def impute_spline(masked: MaskedSeries) -> TimeSeries:
    """Natural cubic spline through every present point, evaluated on the gap."""
    vals = masked.values
    t = np.flatnonzero(~np.isnan(vals))
    if t.size < 4:
        logger.warning("spline needs 4 present points, got %d; using linear", t.size)
        return impute_linear(masked)
    spline = CubicSpline(t, vals[t], bc_type="natural")
    return masked.fill(spline(masked.gap.indices))


# ---------------------------------------------------------------------------
# KNN
# ---------------------------------------------------------------------------


def _training_pairs(x: np.ndarray, w: int) -> tuple[np.ndarray, np.ndarray]:
    windows = np.lib.stride_tricks.sliding_window_view(x, w + 1)
    ok = ~np.isnan(windows).any(axis=1)
    pairs = windows[ok]
    return pairs[:, :w], pairs[:, w]


def _knn_predict(features, targets, query, k, exclude=None) -> float:
    d = ((features - query) ** 2).sum(axis=1)
    if exclude is not None:
        d[exclude] = np.inf
    # stable sort keeps ties in time order
    order = np.argsort(d, kind="stable")[:k]
    return float(targets[order].mean())


def _choose_k(features, targets) -> int:
    n = len(targets)
    best_k, best_err = 1, math.inf
    for k in KNN_GRID:
        if k > n - 1:
            break
        err = 0.0
        for i in range(n):
            err += (_knn_predict(features, targets, features[i], k, exclude=i) - targets[i]) ** 2
        if err < best_err:
            best_k, best_err = k, err
    return best_k


def _knn_forward(x: np.ndarray, start: int, size: int, method: BaselineMethod) -> np.ndarray:
    w = method.knn_window
    features, targets = _training_pairs(x, w)
    if len(targets) == 0:
        raise InsufficientDataError(f"no complete windows of length {w + 1}")
    k = method.knn_k or _choose_k(features, targets)
    k = min(k, len(targets))
    work = x.copy()
    for t in range(start, start + size):
        work[t] = _knn_predict(features, targets, work[t - w : t], k)
    return work[start : start + size]


def impute_knn(masked: MaskedSeries, method: BaselineMethod | None = None) -> TimeSeries:
    """Predict each gap value from the ``k`` nearest windows of present data.

    Windows of ``knn_window`` consecutive values are matched on squared
    distance and the successors of the ``k`` closest are averaged. The gap
    is walked forward from its left context; when fewer than
    ``knn_window`` points precede it, the series is reversed and the gap is
    walked backward from its right context instead. Unset ``knn_k`` is
    picked from :data:`KNN_GRID` by leave-one-out error.
    """
    method = method or BaselineMethod(Kind.KNN)
    g = masked.gap
    x = masked.values
    w = method.knn_window
    if g.start >= w:
        est = _knn_forward(x, g.start, g.size, method)
    elif len(x) - g.stop >= w:
        rev = x[::-1].copy()
        est = _knn_forward(rev, len(x) - g.stop, g.size, method)[::-1]
    else:
        raise InsufficientDataError(f"fewer than {w} observations on both sides of the gap")
    return masked.fill(est)


# ---------------------------------------------------------------------------
# AR / ARIMA
# ---------------------------------------------------------------------------


def _fit_ar(z: np.ndarray, order: int, first: int) -> tuple[np.ndarray, float]:
    """Intercept + AR(order) coefficients from the lag-product normal equations.

    The equations are formed from products over targets ``z[first:]`` so
    that every candidate order is scored on the same sample. Returns
    ``(coef, sigma2)`` where ``coef[0]`` is the intercept.
    """
    y = z[first:]
    cols = [np.ones(y.size)] + [z[first - i : z.size - i] for i in range(1, order + 1)]
    X = np.column_stack(cols)
    gram = X.T @ X
    rhs = X.T @ y
    coef = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    resid = y - X @ coef
    return coef, float(resid @ resid / y.size)


def _ar_forecast(z: np.ndarray, coef: np.ndarray, steps: int) -> np.ndarray:
    order = coef.size - 1
    hist = list(z[-order:]) if order else []
    out = np.empty(steps)
    for m in range(steps):
        value = coef[0] + sum(coef[i] * hist[-i] for i in range(1, order + 1))
        out[m] = value
        hist.append(value)
    return out


def impute_arima(masked: MaskedSeries, method: BaselineMethod | None = None) -> TimeSeries:
    """Forecast the gap from its left context with an AR(p) on a d-differenced prefix.

    ``d`` is 0 when the ADF test rejects a unit root on the prefix and 1
    otherwise; ``p <= arima_max_p`` minimises AIC.
    """
    method = method or BaselineMethod(Kind.ARIMA)
    g = masked.gap
    prefix = masked.values[: g.start]
    if prefix.size < 10 or np.isnan(prefix).any():
        raise InsufficientDataError(f"ARIMA needs 10 complete points before the gap, got {prefix.size}")

    d = 0 if prefix.size >= 20 and adf_is_stationary(prefix) else 1
    z = np.diff(prefix) if d else prefix

    max_p = min(method.arima_max_p, max((z.size - 3) // 2, 0))
    first = max_p
    best = None
    for p in range(max_p + 1):
        coef, sigma2 = _fit_ar(z, p, first)
        n = z.size - first
        aic = n * math.log(max(sigma2, 1e-300)) + 2 * (p + 1)
        if best is None or aic < best[0] - 1e-9 * abs(best[0]):
            best = (aic, coef)
    coef = best[1]
    forecast = _ar_forecast(z, coef, g.size)
    if d:
        forecast = prefix[-1] + np.cumsum(forecast)
    return masked.fill(forecast)


def impute(masked: MaskedSeries, method: BaselineMethod | str) -> TimeSeries:
    """Dispatch to the imputer named by ``method``."""
    if not isinstance(method, BaselineMethod):
        method = BaselineMethod(Kind(method))
    kind = method.kind
    if kind is Kind.MEAN:
        return impute_constant(masked, "mean")
    if kind is Kind.MEDIAN:
        return impute_constant(masked, "median")
    if kind is Kind.LOCF:
        return impute_carry(masked, "forward")
    if kind is Kind.NOCB:
        return impute_carry(masked, "backward")
    if kind is Kind.LINEAR:
        return impute_linear(masked)
    if kind is Kind.SPLINE:
        return impute_spline(masked)
    if kind is Kind.KNN:
        return impute_knn(masked, method)
    return impute_arima(masked, method)
