"""Series-to-image transforms and the bijective scalar <-> RGB code.

A scaled series of length ``L`` becomes an ``R x L`` grid through a
circular-shift family: row ``i`` of family ``k`` reads
``x[(j + i*k) mod L]``. Each grid cell is then packed into a 24-bit RGB
trio. After inpainting, every row yields one candidate for the gap and the
hinge point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import DomainError, ExtractionError, UnsupportedInputError
from .series import GapSpec, MaskedSeries

__all__ = [
    "CODE_MAX",
    "QUANTUM",
    "TransformFamily",
    "MaskedGrid",
    "Candidate",
    "CandidateMatrix",
    "encode_value",
    "decode_rgb",
    "encode_array",
    "decode_array",
    "build_matrix",
    "grid_to_image",
    "extract_candidates",
    "write_ppm",
    "write_mask",
    "DEFAULT_ROWS",
]

CODE_MAX = 256**3 - 1
QUANTUM = 1.0 / CODE_MAX
DEFAULT_ROWS = 32


def encode_value(v: float) -> tuple[int, int, int]:
    """Pack a value in [0, 1] into an (R, G, B) trio, most significant byte first."""
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"value {v!r} outside [0, 1]")
    n = int(round(v * CODE_MAX))
    return (n >> 16, (n >> 8) & 0xFF, n & 0xFF)


def decode_rgb(trio: tuple[int, int, int]) -> float:
    r, g, b = (int(c) for c in trio)
    if not all(0 <= c <= 255 for c in (r, g, b)):
        raise DomainError(f"channel out of range in {trio!r}")
    return (r * 65536 + g * 256 + b) / CODE_MAX


def encode_array(values: np.ndarray) -> np.ndarray:
    """Vectorised :func:`encode_value`; returns ``values.shape + (3,)`` uint8."""
    values = np.asarray(values, dtype=np.float64)
    if values.size and not ((values >= 0.0) & (values <= 1.0)).all():
        raise DomainError("values outside [0, 1]")
    n = np.rint(values * CODE_MAX).astype(np.int64)
    return np.stack([n >> 16, (n >> 8) & 0xFF, n & 0xFF], axis=-1).astype(np.uint8)


def decode_array(pixels: np.ndarray) -> np.ndarray:
    """Vectorised :func:`decode_rgb` over the trailing channel axis."""
    p = np.asarray(pixels)
    if p.shape[-1] != 3:
        raise DomainError("expected a trailing RGB axis of size 3")
    if p.dtype != np.uint8 and p.size and (p.min() < 0 or p.max() > 255):
        raise DomainError("channel out of range")
    p = p.astype(np.int64)
    return (p[..., 0] * 65536 + p[..., 1] * 256 + p[..., 2]) / CODE_MAX


@dataclass(frozen=True)
class TransformFamily:
    """Circular-shift family ``k`` with ``rows`` rows."""

    k: int
    rows: int = DEFAULT_ROWS

    def __post_init__(self):
        if not 1 <= self.k <= 6:
            raise ValueError(f"family index must be in 1..6, got {self.k}")
        if self.rows < 2:
            raise ValueError(f"need at least two rows, got {self.rows}")

    def for_length(self, length: int) -> "TransformFamily":
        """Cap the row count at the series length."""
        return TransformFamily(self.k, min(self.rows, length))

    def origin(self, length: int) -> np.ndarray:
        """``rows x length`` array of the time index behind each cell."""
        i = np.arange(self.rows)[:, None]
        j = np.arange(length)[None, :]
        return (j + i * self.k) % length

    def column_of(self, t: int, row: int, length: int) -> int:
        return (t - row * self.k) % length


@dataclass(frozen=True, eq=False)
class MaskedGrid:
    cells: np.ndarray  # rows x L float, NaN where absent
    origin: np.ndarray  # rows x L int
    family: TransformFamily

    @property
    def absent(self) -> np.ndarray:
        return np.isnan(self.cells)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape


def build_matrix(scaled: MaskedSeries | np.ndarray, family: TransformFamily) -> MaskedGrid:
    x = scaled.values if isinstance(scaled, MaskedSeries) else np.asarray(scaled, dtype=np.float64)
    length = x.size
    if length < 2:
        raise UnsupportedInputError("series too short to build a matrix")
    present = x[~np.isnan(x)]
    if present.size and (present.min() < 0.0 or present.max() > 1.0):
        raise DomainError("build_matrix expects values scaled to [0, 1]")
    if family.rows > length:
        family = family.for_length(length)
    origin = family.origin(length)
    return MaskedGrid(x[origin], origin, family)


def _nearest_fill(cells: np.ndarray) -> np.ndarray:
    """Replace NaNs by the nearest present value in the same row (ties go left)."""
    out = cells.copy()
    cols = np.arange(cells.shape[1])
    for r in range(cells.shape[0]):
        row = cells[r]
        ok = ~np.isnan(row)
        if not ok.any():
            out[r] = 0.0
            continue
        known = cols[ok]
        pos = np.searchsorted(known, cols)
        left = known[np.clip(pos - 1, 0, known.size - 1)]
        right = known[np.clip(pos, 0, known.size - 1)]
        pick = np.where(np.abs(cols - left) <= np.abs(right - cols), left, right)
        out[r] = np.where(ok, row, row[pick])
    return out


def grid_to_image(grid: MaskedGrid, fill_hint: str = "nearest") -> tuple[np.ndarray, np.ndarray]:
    """Encode a grid as an ``(rows, L, 3)`` uint8 image and a boolean unknown-mask.

    Absent cells get a placeholder pixel (``zero`` or ``nearest`` present value
    in the row); the inpainter never reads them.
    """
    mask = grid.absent.copy()
    if fill_hint == "zero":
        cells = np.where(mask, 0.0, grid.cells)
    elif fill_hint == "nearest":
        cells = _nearest_fill(grid.cells)
    else:
        raise ValueError(f"unknown fill hint {fill_hint!r}")
    return encode_array(cells), mask


@dataclass(frozen=True)
class Candidate:
    row: int
    gap: np.ndarray
    hinge: float


@dataclass(frozen=True)
class CandidateMatrix:
    family: TransformFamily
    candidates: tuple[Candidate, ...]

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def gap_estimates(self) -> np.ndarray:
        """``n_candidates x T`` array."""
        return np.stack([c.gap for c in self.candidates])

    @property
    def hinge_estimates(self) -> np.ndarray:
        return np.array([c.hinge for c in self.candidates])


def extract_candidates(
    inpainted: np.ndarray,
    family: TransformFamily,
    gap: GapSpec,
    hinge_index: int,
) -> CandidateMatrix:
    """Read one (gap, hinge) candidate per image row."""
    rows, length = inpainted.shape[:2]
    if family.rows != rows:
        family = TransformFamily(family.k, rows)
    if rows > length:
        raise ExtractionError(f"{rows} rows exceed series length {length}")
    if not 0 <= hinge_index < length:
        raise ExtractionError(f"hinge index {hinge_index} outside the series")
    values = decode_array(inpainted)
    times = np.append(gap.indices, hinge_index)
    r = np.arange(rows)[:, None]
    cols = (times[None, :] - r * family.k) % length
    picked = values[r, cols]
    candidates = tuple(
        Candidate(int(i), picked[i, :-1].copy(), float(picked[i, -1])) for i in range(rows)
    )
    return CandidateMatrix(family, candidates)


def write_ppm(image: np.ndarray, destination: IO[bytes]) -> None:
    """Binary PPM (P6) dump for visual inspection."""
    h, w = image.shape[:2]
    destination.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
    destination.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def write_mask(mask: np.ndarray, destination: IO[str]) -> None:
    for row in np.asarray(mask, dtype=bool):
        destination.write("".join("1" if m else "0" for m in row) + "\n")
