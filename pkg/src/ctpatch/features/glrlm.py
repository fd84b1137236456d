"""Gray-level run-length matrix and its 7 statistics.

Entry (i, j) counts the maximal runs of gray level i with length j + 1 along
the chosen direction.  Gray-level indices are 1-based inside the low/high
emphasis formulas (the quantized value v contributes as i = v + 1), which
keeps them finite for v = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMatrixError
from .base import FeatureVector
from .glcm import _check_levels

GLRLM_FEATURE_NAMES = (
    "short_run_emphasis",
    "long_run_emphasis",
    "gray_level_nonuniformity",
    "run_length_nonuniformity",
    "run_percentage",
    "low_gray_level_run_emphasis",
    "high_gray_level_run_emphasis",
)


@dataclass(frozen=True, eq=False)
class RunLengthMatrix:
    counts: np.ndarray  # (levels, max_run) int64
    levels: int
    theta: int

    @property
    def max_run(self) -> int:
        return self.counts.shape[1]


def direction_lines(pixels: np.ndarray, theta: int) -> list[np.ndarray]:
    """The 1-D scan lines of a 2-D grid for a given direction."""
    p = np.asarray(pixels)
    h, w = p.shape
    if theta == 0:
        return [p[r, :] for r in range(h)]
    if theta == 90:
        return [p[:, c] for c in range(w)]
    if theta == 45:
        flipped = np.fliplr(p)
        return [np.diagonal(flipped, off) for off in range(-(h - 1), w)]
    if theta == 135:
        return [np.diagonal(p, off) for off in range(-(h - 1), w)]
    raise ValueError(f"theta must be one of (0, 45, 90, 135), got {theta}")


def build_glrlm(pixels: np.ndarray, levels: int, theta: int = 0) -> RunLengthMatrix:
    """Count maximal equal-value runs along the given direction."""
    p = _check_levels(pixels, levels)
    lines = direction_lines(p, theta)
    max_run = max(line.size for line in lines)
    counts = np.zeros((levels, max_run), dtype=np.int64)
    for line in lines:
        if line.size == 0:
            continue
        breaks = np.flatnonzero(np.diff(line) != 0)
        starts = np.concatenate(([0], breaks + 1))
        ends = np.concatenate((breaks, [line.size - 1]))
        lengths = ends - starts + 1
        np.add.at(counts, (line[starts], lengths - 1), 1)
    return RunLengthMatrix(counts=counts, levels=levels, theta=theta)


def glrlm_features(matrix: RunLengthMatrix, num_pixels: int) -> FeatureVector:
    """The 7 run-length statistics, in the documented order."""
    p = matrix.counts.astype(np.float64)
    n_runs = p.sum()
    if n_runs <= 0:
        raise EmptyMatrixError("run-length matrix holds no runs")
    if num_pixels <= 0:
        raise ValueError(f"num_pixels must be positive, got {num_pixels}")

    j = np.arange(1, matrix.max_run + 1, dtype=np.float64)
    i = np.arange(1, matrix.levels + 1, dtype=np.float64)
    per_level = p.sum(axis=1)
    per_length = p.sum(axis=0)

    sre = float((per_length / j**2).sum() / n_runs)
    lre = float((per_length * j**2).sum() / n_runs)
    gln = float((per_level**2).sum() / n_runs)
    rln = float((per_length**2).sum() / n_runs)
    run_percentage = float(n_runs / num_pixels)
    lglre = float((per_level / i**2).sum() / n_runs)
    hglre = float((per_level * i**2).sum() / n_runs)

    return FeatureVector(
        "GLRLM", np.array([sre, lre, gln, rln, run_percentage, lglre, hglre])
    )
