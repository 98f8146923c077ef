"""Hinge selection on top of image-inpainting imputation.

One observed neighbour of the gap (the *hinge*) is dropped and imputed
together with the gap. Every image row of every transform family yields a
candidate; the candidate whose hinge estimate lands closest to the stored
hinge value supplies the gap. The hinge itself is then restored from
storage.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .codec import (
    DEFAULT_ROWS,
    CandidateMatrix,
    TransformFamily,
    build_matrix,
    extract_candidates,
    grid_to_image,
)
from .errors import ConfigError, GapfillError, PipelineError, SelectionError, UnsupportedInputError
from .inpaint import InpaintConfig, inpaint
from .series import MaskedSeries, ScaleParams, TimeSeries, minmax_scale, minmax_unscale

__all__ = [
    "HingeSide",
    "PipelineConfig",
    "Choice",
    "ImputationResult",
    "prepare_hinge",
    "select_best",
    "hinge_fm2i",
]

logger = logging.getLogger(__name__)


class HingeSide(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    def index(self, masked: MaskedSeries) -> int:
        return masked.gap.start - 1 if self is HingeSide.LEFT else masked.gap.stop


@dataclass(frozen=True)
class PipelineConfig:
    patch_size: int = 9
    rows: int = DEFAULT_ROWS
    families: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    fill_hint: str = "nearest"
    distance_plane: str = "decoded_scalar"
    alpha: float = 1.0
    offset_compensation: bool = True

    def __post_init__(self):
        if self.rows < 2:
            raise ConfigError(f"rows must be at least 2, got {self.rows}")
        if not self.families or any(k not in range(1, 7) for k in self.families):
            raise ConfigError(f"families must be drawn from 1..6, got {self.families}")
        if self.fill_hint not in ("nearest", "zero"):
            raise ConfigError(f"fill_hint must be 'nearest' or 'zero', got {self.fill_hint!r}")
        self.inpaint_config  # validates the inpainting fields

    @property
    def inpaint_config(self) -> InpaintConfig:
        return InpaintConfig(
            patch_size=self.patch_size, distance_plane=self.distance_plane, alpha=self.alpha,
            offset_compensation=self.offset_compensation,
        )


@dataclass(frozen=True)
class Choice:
    family: int
    row: int
    hinge_error: float  # scaled units
    gap: np.ndarray = field(repr=False)  # scaled gap estimates


@dataclass(frozen=True, eq=False)
class ImputationResult:
    imputed_series: TimeSeries
    chosen: Choice
    per_family_candidates: tuple[CandidateMatrix, ...]
    side: HingeSide
    hinge_index: int
    stored_hinge: float
    params: ScaleParams

    def candidate_gaps(self) -> np.ndarray:
        """Every candidate gap sequence in original units, ``n x T``."""
        scaled = np.concatenate([cm.gap_estimates for cm in self.per_family_candidates])
        return minmax_unscale(scaled, self.params)

    @property
    def gap_values(self) -> np.ndarray:
        gap = self.chosen.gap
        return minmax_unscale(gap, self.params)


def prepare_hinge(masked: MaskedSeries, side: HingeSide | str) -> tuple[MaskedSeries, float, int]:
    """Drop the hinge observation; returns ``(masked_with_hinge_absent, stored, hinge_index)``."""
    side = HingeSide(side)
    idx = side.index(masked)
    if not 0 <= idx < len(masked):
        raise UnsupportedInputError(f"hinge index {idx} outside the series")
    stored = float(masked.values[idx])
    if np.isnan(stored):
        raise UnsupportedInputError(f"hinge index {idx} is already missing")
    vals = masked.values.copy()
    vals[idx] = np.nan
    return MaskedSeries(masked.base.with_values(vals), masked.gap, masked.removed), stored, idx


def select_best(
    candidate_sets: Sequence[CandidateMatrix], stored_hinge_scaled: float
) -> Choice:
    """Global argmin of ``|hinge estimate - stored|``; ties go to the lower family, then row."""
    best = None
    for cm in sorted(candidate_sets, key=lambda c: c.family.k):
        for cand in cm.candidates:
            err = abs(cand.hinge - stored_hinge_scaled)
            key = (err, cm.family.k, cand.row)
            if best is None or key < best[0]:
                best = (key, cand)
    if best is None:
        raise SelectionError("no candidates to select from")
    (err, k, row), cand = best
    return Choice(k, row, float(err), cand.gap)


def _scale_point(value: float, params: ScaleParams) -> float:
    return 0.5 if params.degenerate else (value - params.min) / params.range


def hinge_fm2i(
    masked: MaskedSeries,
    side: HingeSide | str = HingeSide.LEFT,
    cfg: PipelineConfig | None = None,
) -> ImputationResult:
    """Impute the gap of ``masked`` with hinge-selected inpainting candidates."""
    cfg = cfg or PipelineConfig()
    side = HingeSide(side)
    hinged, stored, hinge_index = prepare_hinge(masked, side)
    scaled, params = minmax_scale(hinged)
    length = len(masked)
    icfg = cfg.inpaint_config

    matrices = []
    for k in cfg.families:
        family = TransformFamily(k, cfg.rows).for_length(length)
        try:
            grid = build_matrix(scaled, family)
            image, mask = grid_to_image(grid, cfg.fill_hint)
            filled = inpaint(image, mask, icfg)
            matrices.append(extract_candidates(filled, family, masked.gap, hinge_index))
        except GapfillError as exc:
            logger.warning("family %d skipped for series %s: %s", k, masked.base.id, exc)
    if not matrices:
        raise PipelineError(f"every transform family failed for series {masked.base.id!r}")

    choice = select_best(matrices, _scale_point(stored, params))
    imputed = masked.fill(minmax_unscale(choice.gap, params))
    return ImputationResult(
        imputed_series=imputed,
        chosen=choice,
        per_family_candidates=tuple(matrices),
        side=side,
        hinge_index=hinge_index,
        stored_hinge=stored,
        params=params,
    )
