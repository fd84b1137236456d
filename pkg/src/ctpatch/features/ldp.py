"""Eight-neighbor sign code map.

Each pixel receives an 8-bit code: bit n is set when neighbor n is >= the
center value.  Neighbors are indexed n = 0..7 clockwise starting at the
top-left corner.  Borders use replicate padding so the code map has the same
shape as the input.
"""

from __future__ import annotations

import numpy as np

from .base import FeatureVector

# (row, col) offsets for bits 0..7: top-left, then clockwise.
NEIGHBOR_OFFSETS = (
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
)


def ldp_map(pixels: np.ndarray) -> np.ndarray:
    """Per-pixel 8-bit neighbor-sign codes, same shape as the input."""
    p = np.asarray(pixels, dtype=np.int64)
    if p.ndim != 2 or p.size == 0:
        raise ValueError(f"expected a non-empty 2-D pixel grid, got shape {p.shape}")
    h, w = p.shape
    padded = np.pad(p, 1, mode="edge")
    codes = np.zeros((h, w), dtype=np.uint16)
    for bit, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        neighbor = padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        codes += (neighbor >= p).astype(np.uint16) << bit
    return codes.astype(np.uint8)


def ldp_vector(pixels: np.ndarray) -> FeatureVector:
    """Row-major flattened code map rescaled to [0, 1]."""
    return FeatureVector("LDP", ldp_map(pixels).ravel().astype(np.float64) / 255.0)
