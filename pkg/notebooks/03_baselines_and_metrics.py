# %% [markdown]
# # Baselines and accuracy metrics
#
# Eight reference imputers run on the same gap. The scores use the
# M3-style sMAPE (0 to 200), RMSE, MAE and the range-normalised
# similarity.

# %%
import numpy as np

from gapfill import adf_is_stationary, impute, m3_like, score
from gapfill.baselines import Kind
from gapfill.series import center_gap, inject_gap

series = m3_like(5, seed=2024)[1]
masked = inject_gap(series, center_gap(len(series), 10))
rng = float(np.ptp(series.values))
print(series.id, "stationary by ADF:", adf_is_stationary(series))

# %%
print(f"{'method':8s} {'sMAPE':>7s} {'RMSE':>9s} {'MAE':>9s} {'Sim':>6s}")
for kind in Kind:
    est = impute(masked, kind.value).values[masked.gap.indices]
    r = score(masked.removed, est, rng)
    print(f"{kind.value:8s} {r.smape:7.2f} {r.rmse:9.2f} {r.mae:9.2f} {r.sim:6.3f}")
