# %% [markdown]
# # A small benchmark
#
# Each series gets a centred gap of 5, 10 and 20 points. Every method is
# scored and timed; aggregates are also split by ADF stationarity. The
# same run is available as `gapfill bench --synthetic 8`.

# %%
import io

from gapfill import BenchmarkConfig, emit_report, m3_like, run_benchmark

report = run_benchmark(m3_like(8, seed=2024), BenchmarkConfig(methods=("hinge", "linear", "median", "arima")))

# %%
for gap in (5, 10, 20):
    line = ", ".join(f"{m} {report.aggregate(m, gap).smape:.2f}"
                     for m in ("hinge-left", "hinge-right", "linear", "median", "arima"))
    print(f"T={gap:2d}: {line}")

# %%
for flag in (True, False):
    try:
        agg = report.aggregate("hinge-right", 10, flag)
    except KeyError:
        continue
    print("stationary" if flag else "non-stationary", "n =", agg.n, "sMAPE", round(agg.smape, 2))

# %%
buf = io.StringIO()
emit_report(report, "csv", buf)
print("\n".join(buf.getvalue().splitlines()[:4]))
