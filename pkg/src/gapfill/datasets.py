"""Synthetic series in the style of the M3 monthly/quarterly/other subsets.

Used where the real competition files are not available: each series mixes
a level, a trend (none, linear, damped or exponential), an optional
seasonal profile, a stochastic component (AR(1) noise or a random walk)
and occasional level shifts, then is kept strictly positive.
"""

from __future__ import annotations

import numpy as np

from .series import Period, TimeSeries

__all__ = ["m3_like", "m3_like_series"]

_PERIOD_LAGS = {Period.MONTHLY: 12, Period.QUARTERLY: 4, Period.OTHER: 1}


def m3_like_series(rng: np.random.Generator, series_id: str, length: int, period: Period) -> TimeSeries:
    t = np.arange(length, dtype=np.float64)
    level = float(rng.lognormal(np.log(4000.0), 0.6))

    # total trend movement over the series, as a fraction of the level
    kind = rng.choice(["none", "linear", "damped", "exponential"], p=[0.1, 0.4, 0.25, 0.25])
    change = rng.uniform(0.3, 1.5) * rng.choice([-0.6, 1.0])
    u = t / (length - 1)
    if kind == "linear":
        trend = change * level * u
    elif kind == "damped":
        rate = rng.uniform(2.0, 6.0)
        trend = change * level * (1 - np.exp(-rate * u)) / (1 - np.exp(-rate))
    elif kind == "exponential":
        rate = rng.uniform(1.0, 3.0)
        trend = change * level * (np.exp(rate * u) - 1) / (np.exp(rate) - 1)
    else:
        trend = np.zeros(length)

    s = _PERIOD_LAGS[period]
    seasonal = np.zeros(length)
    if s > 1 and rng.random() < 0.7:
        profile = rng.normal(0.0, 1.0, s)
        profile -= profile.mean()
        profile /= max(np.abs(profile).max(), 1e-9)
        seasonal = rng.uniform(0.03, 0.25) * profile[np.arange(length) % s]

    sigma = rng.uniform(0.01, 0.06) * level
    if rng.random() < 0.3:
        stochastic = np.cumsum(rng.normal(0.0, sigma * 0.6, length))
    else:
        phi = rng.uniform(0.0, 0.8)
        eps = rng.normal(0.0, sigma, length)
        stochastic = np.empty(length)
        stochastic[0] = eps[0]
        for i in range(1, length):
            stochastic[i] = phi * stochastic[i - 1] + eps[i]

    shifts = np.zeros(length)
    if rng.random() < 0.15:
        at = int(rng.integers(length // 5, 4 * length // 5))
        shifts[at:] = rng.normal(0.0, 0.1) * level

    base = level + trend + shifts + stochastic
    values = base * (1.0 + seasonal) if rng.random() < 0.5 else base + seasonal * level
    floor = 0.05 * level
    if values.min() < floor:
        values = values - values.min() + floor
    return TimeSeries(series_id, np.round(values, 2), period)


def m3_like(n: int = 60, seed: int = 2024, min_length: int = 70, max_length: int = 144) -> list[TimeSeries]:
    """``n`` reproducible series, mostly monthly, lengths in ``[min_length, max_length]``."""
    rng = np.random.default_rng(seed)
    periods = [Period.MONTHLY, Period.QUARTERLY, Period.OTHER]
    out = []
    for i in range(n):
        period = periods[rng.choice(3, p=[0.75, 0.1, 0.15])]
        length = int(rng.integers(min_length, max_length + 1))
        out.append(m3_like_series(rng, f"N{i + 1:04d}", length, period))
    return out
