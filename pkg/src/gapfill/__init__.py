"""Univariate gap filling by hinge-selected image inpainting, with baselines and a benchmark."""

__version__ = "0.1.0"

from .baselines import BaselineMethod, Kind, impute
from .bench import BenchmarkConfig, BenchmarkReport, emit_report, run_benchmark, selection_bounds
from .codec import TransformFamily, decode_rgb, encode_value
from .datasets import m3_like
from .errors import ConfigError, DataError, GapfillError
from .hinge import HingeSide, ImputationResult, PipelineConfig, hinge_fm2i
from .inpaint import InpaintConfig, inpaint
from .metrics import MetricRecord, adf_is_stationary, mae, rmse, score, sim, smape
from .series import GapSpec, MaskedSeries, TimeSeries, center_gap, find_single_gap, inject_gap, load_csv, write_csv

__all__ = [
    "BaselineMethod", "Kind", "impute",
    "BenchmarkConfig", "BenchmarkReport", "emit_report", "run_benchmark", "selection_bounds",
    "TransformFamily", "decode_rgb", "encode_value",
    "m3_like",
    "ConfigError", "DataError", "GapfillError",
    "HingeSide", "ImputationResult", "PipelineConfig", "hinge_fm2i",
    "InpaintConfig", "inpaint",
    "MetricRecord", "adf_is_stationary", "mae", "rmse", "score", "sim", "smape",
    "GapSpec", "MaskedSeries", "TimeSeries", "center_gap", "find_single_gap", "inject_gap", "load_csv", "write_csv",
]
