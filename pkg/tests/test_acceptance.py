"""Acceptance criteria, one test each, at the agreed tolerances.

Every test reports a single PASS/FAIL line (collected in the terminal
summary). The accuracy benchmark runs on generated M3-like series from a
held-out seed that was never used while developing or tuning.
"""

import math
import time

import numpy as np
import pytest

from gapfill.baselines import impute
from gapfill.bench import BASELINE_METHODS, BenchmarkConfig, run_benchmark
from gapfill.codec import CODE_MAX, QUANTUM, decode_array, encode_array
from gapfill.datasets import m3_like
from gapfill.hinge import hinge_fm2i
from gapfill.inpaint import FillState, InpaintConfig, find_best_source, inpaint
from gapfill.metrics import adf_is_stationary, mae, rmse, score, sim, smape
from gapfill.series import GapSpec, TimeSeries, center_gap, find_single_gap, inject_gap

HOLDOUT_SEED = 7  # development used seed 2024
HOLDOUT_SIZE = 60
GAP_SIZES = (5, 10, 20)
LINEAR_SLACK = 1.15


@pytest.fixture(scope="module")
def holdout_report():
    data = m3_like(HOLDOUT_SIZE, seed=HOLDOUT_SEED)
    t0 = time.perf_counter()
    report = run_benchmark(data, BenchmarkConfig(gap_sizes=GAP_SIZES))
    return report, time.perf_counter() - t0


def test_1_codec_bijection(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    sampled = rng.integers(0, 2**24, 1_000_000)
    extremes = []
    for ch in range(3):
        for a in (0, 255):
            for b in (0, 255):
                others = [a, b]
                trio = np.zeros((256, 3), np.int64)
                trio[:, ch] = np.arange(256)
                trio[:, [c for c in range(3) if c != ch]] = others
                extremes.append(trio[:, 0] * 65536 + trio[:, 1] * 256 + trio[:, 2])
    codes = np.concatenate([sampled, *extremes, [0, CODE_MAX]])
    rgb = np.stack([codes >> 16, (codes >> 8) & 255, codes & 255], -1).astype(np.uint8)
    values = decode_array(rgb)
    codes_ok = np.array_equal(encode_array(values), rgb) and np.array_equal(np.rint(values * CODE_MAX), codes)

    v = np.concatenate([rng.random(1_000_000), [0.0, 1.0, 0.5]])
    err = np.abs(decode_array(encode_array(v)) - v).max()
    elapsed = time.perf_counter() - t0
    ok = codes_ok and err <= 0.5 / CODE_MAX and elapsed < 10
    acceptance(1, ok, f"{codes.size} codes exact={codes_ok}, scalar err {err:.3g} <= {0.5 / CODE_MAX:.3g}, {elapsed:.2f}s < 10s")


def test_2_inpainting_oracles(acceptance):
    t0 = time.perf_counter()
    const = encode_array(np.full((16, 24), 0.37))
    mask = np.zeros((16, 24), bool)
    mask[5:11, 7:15] = True
    const_ok = bool((inpaint(const, mask) == const[0, 0]).all())

    cols = np.tile(np.arange(32) / 31, (24, 1))
    mask = np.zeros(cols.shape, bool)
    mask[10:13, 14:17] = True
    ramp_err = np.abs(decode_array(inpaint(encode_array(cols), mask))[mask] - cols[mask]).max()
    ramp_ok = ramp_err <= 2 * QUANTUM

    texture = np.random.default_rng(11).random((32, 32))
    texture[20:29, 3:12] = texture[5:14, 15:24]
    known = np.ones((32, 32), bool)
    known[8:11, 18:21] = False
    src = find_best_source(FillState(encode_array(texture), known), (9, 19), InpaintConfig())
    dup_ok = src == (20, 3)
    elapsed = time.perf_counter() - t0
    ok = const_ok and ramp_ok and dup_ok and elapsed < 5
    acceptance(2, ok, f"constant={const_ok}, ramp err {ramp_err / QUANTUM:.2f} quanta, duplicate at {src}, {elapsed:.2f}s < 5s")


def _masked(values):
    return find_single_gap(TimeSeries("x", np.asarray(values, dtype=float)))


def test_3_baseline_exactness(acceptance):
    checks = {
        "mean": impute(_masked([1, np.nan, 3]), "mean").values.tolist() == [1, 2, 3],
        "median": impute(_masked([1, np.nan, 3, 100]), "median").values[1] == 3,
        "locf": impute(_masked([1, np.nan, np.nan, 4]), "locf").values.tolist() == [1, 1, 1, 4],
        "nocb": impute(_masked([1, np.nan, np.nan, 4]), "nocb").values.tolist() == [1, 4, 4, 4],
        "linear": impute(_masked([1, np.nan, np.nan, 4]), "linear").values.tolist() == [1, 2, 3, 4],
    }
    t = np.arange(70.0)
    cubic = t**3
    out = impute(inject_gap(TimeSeries("c", cubic), GapSpec(30, 10)), "spline").values[30:40]
    spline_rel = np.abs(out - cubic[30:40]).max() / np.abs(cubic[30:40]).max()
    ar = 50.0 * 0.8 ** np.arange(80)
    out = impute(inject_gap(TimeSeries("a", ar), GapSpec(40, 10)), "arima").values[40:50]
    expected = ar[39] * 0.8 ** np.arange(1, 11)
    ar_rel = np.abs(out - expected).max() / np.abs(expected).max()
    ok = all(checks.values()) and spline_rel <= 1e-6 and ar_rel <= 1e-6
    failed = [k for k, v in checks.items() if not v]
    acceptance(3, ok, f"exact oracles failed={failed}, spline rel {spline_rel:.2g}, AR(1) rel {ar_rel:.2g} (<= 1e-6)")


def test_4_metric_exactness(acceptance):
    a = np.array([1.0, 5.0, 3.0])
    hand = [
        abs(smape([3.0, 4.0], [3.0, 4.0])) <= 1e-9,
        abs(smape([100.0], [50.0]) - 200 / 3) <= 1e-9,
        abs(rmse([1.0, 2.0], [1.0, 4.0]) - math.sqrt(2)) <= 1e-9,
        abs(mae([1.0, 2.0], [1.0, 4.0]) - 1.0) <= 1e-9,
        sim(a, a, 4.0) == 1.0,
        abs(sim(a, a + 4.0, 4.0) - 0.5) <= 1e-9,
    ]
    rng = np.random.default_rng(99)
    violations = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 30))
        x = rng.normal(0, 10 ** rng.uniform(-2, 4), n)
        y = x + rng.normal(0, 10 ** rng.uniform(-3, 3), n)
        s, m, r = smape(x, y), mae(x, y), rmse(x, y)
        v = sim(x, y, float(np.ptp(x)))
        good = (
            abs(s - smape(y, x)) <= 1e-9
            and 0 <= s <= 200 + 1e-9
            and m <= r * (1 + 1e-12) + 1e-15
            and r <= m * math.sqrt(n) * (1 + 1e-12) + 1e-15
            and 0 < v <= 1
        )
        violations += not good
    ok = all(hand) and violations == 0
    acceptance(4, ok, f"hand values {sum(hand)}/{len(hand)}, property violations {violations}/10000")


def test_5_bracketing(acceptance, holdout_report):
    report, _ = holdout_report
    hinge_rows = [r for r in report.rows if r.method.startswith("hinge")]
    outside = [
        (r.series_id, r.method, r.gap_size)
        for r in hinge_rows
        if not (r.ok and r.bounds.best <= r.metrics.smape <= r.bounds.worst)
    ]
    ok = bool(hinge_rows) and not outside
    acceptance(5, ok, f"{len(hinge_rows) - len(outside)}/{len(hinge_rows)} hinge runs inside [best, worst]")


def test_6_directional_ordering(acceptance, holdout_report):
    report, elapsed = holdout_report
    n_series = len({r.series_id for r in report.rows})
    lines, ok = [], n_series >= 50 and elapsed < 30 * 60
    for gap in GAP_SIZES:
        left = report.aggregate("hinge-left", gap).smape
        right = report.aggregate("hinge-right", gap).smape
        better = min(left, right)
        others = {m: report.aggregate(m, gap).smape for m in BASELINE_METHODS}
        beaten = all(better < others[m] for m in others if m != "linear")
        near_linear = better <= LINEAR_SLACK * others["linear"]
        ok = ok and beaten and near_linear
        best_rival = min((v, m) for m, v in others.items() if m != "linear")
        lines.append(
            f"T={gap}: hinge {better:.2f} vs best rival {best_rival[1]} {best_rival[0]:.2f}, "
            f"linear {others['linear']:.2f} (ratio {better / others['linear']:.3f})"
        )
    acceptance(6, ok, f"{n_series} series, {elapsed:.0f}s; " + "; ".join(lines))


def test_7_runtime_envelope(acceptance):
    series = max(m3_like(HOLDOUT_SIZE, seed=HOLDOUT_SEED), key=len)
    timings = {}
    for gap in (5, 20):
        masked = inject_gap(series, center_gap(len(series), gap))
        t0 = time.perf_counter()
        hinge_fm2i(masked, "left")
        timings[gap] = time.perf_counter() - t0
    ok = timings[5] < 10 and timings[20] < 30
    acceptance(7, ok, f"L={len(series)}: gap 5 {timings[5]:.2f}s < 10s, gap 20 {timings[20]:.2f}s < 30s")


def test_8_stationarity_split(acceptance, holdout_report):
    report, _ = holdout_report
    groups = {r.stationary for r in report.rows}
    present = all(
        report.aggregate(m, gap, flag).n > 0
        for m in ("hinge-left", "hinge-right")
        for gap in GAP_SIZES
        for flag in groups
    )
    walk = sum(not adf_is_stationary(np.cumsum(np.random.default_rng(s).normal(size=200))) for s in range(100))
    ar_hits = 0
    for s in range(100):
        e = np.random.default_rng(1000 + s).normal(size=200)
        x = np.empty(200)
        x[0] = e[0]
        for t in range(1, 200):
            x[t] = 0.2 * x[t - 1] + e[t]
        ar_hits += adf_is_stationary(x)
    ok = groups == {True, False} and present and walk >= 95 and ar_hits >= 95
    acceptance(8, ok, f"groups {sorted(groups)}, per-group aggregates={present}, random walk {walk}/100, AR(1) {ar_hits}/100")


def test_9_constant_series(acceptance):
    records = []
    for value, length in ((5.0, 70), (123.25, 90)):
        series = TimeSeries("c", np.full(length, value))
        for gap in GAP_SIZES:
            masked = inject_gap(series, center_gap(length, gap))
            for side in ("left", "right"):
                out = hinge_fm2i(masked, side).imputed_series.values
                records.append(score(masked.removed, out[masked.gap.indices], 0.0))
    ok = all(r.smape == r.rmse == r.mae == 0.0 and r.sim == 1.0 for r in records)
    acceptance(9, ok, f"{len(records)} runs, all zero error and sim 1: {ok}")
