"""Gray-level size-zone matrix and its 13 statistics.

A zone is a connected component of equal-valued pixels (8-connectivity by
default).  Entry (i, s) counts the zones of gray level i with size s + 1.
Gray-level indices are 1-based inside the emphasis formulas, as for the
run-length statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import generate_binary_structure, label as connected_label

from ..errors import EmptyMatrixError
from .base import FeatureVector
from .glcm import _check_levels

GLSZM_FEATURE_NAMES = (
    "small_zone_emphasis",
    "large_zone_emphasis",
    "gray_level_nonuniformity",
    "size_zone_nonuniformity",
    "zone_percentage",
    "low_gray_level_zone_emphasis",
    "high_gray_level_zone_emphasis",
    "small_zone_low_gray_level_emphasis",
    "small_zone_high_gray_level_emphasis",
    "large_zone_low_gray_level_emphasis",
    "large_zone_high_gray_level_emphasis",
    "gray_level_variance",
    "size_zone_variance",
)


@dataclass(frozen=True, eq=False)
class SizeZoneMatrix:
    counts: np.ndarray  # (levels, max_zone) int64
    levels: int
    connectivity: int

    @property
    def max_zone(self) -> int:
        return self.counts.shape[1]


def build_glszm(pixels: np.ndarray, levels: int, connectivity: int = 8) -> SizeZoneMatrix:
    """Count connected equal-value zones by (gray level, zone size)."""
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    p = _check_levels(pixels, levels)
    structure = generate_binary_structure(2, 2 if connectivity == 8 else 1)

    zones: list[tuple[int, int]] = []
    for value in np.unique(p):
        labeled, n_zones = connected_label(p == value, structure=structure)
        if n_zones == 0:
            continue
        sizes = np.bincount(labeled.ravel())[1:]
        zones.extend((int(value), int(s)) for s in sizes)

    max_zone = max((s for _, s in zones), default=1)
    counts = np.zeros((levels, max_zone), dtype=np.int64)
    for value, size in zones:
        counts[value, size - 1] += 1
    return SizeZoneMatrix(counts=counts, levels=levels, connectivity=connectivity)


def glszm_features(matrix: SizeZoneMatrix, num_pixels: int) -> FeatureVector:
    """The 13 size-zone statistics, in the documented order."""
    p = matrix.counts.astype(np.float64)
    n_zones = p.sum()
    if n_zones <= 0:
        raise EmptyMatrixError("size-zone matrix holds no zones")
    if num_pixels <= 0:
        raise ValueError(f"num_pixels must be positive, got {num_pixels}")

    s = np.arange(1, matrix.max_zone + 1, dtype=np.float64)
    i = np.arange(1, matrix.levels + 1, dtype=np.float64)
    gi, gs = np.meshgrid(i, s, indexing="ij")
    per_level = p.sum(axis=1)
    per_size = p.sum(axis=0)

    sze = float((per_size / s**2).sum() / n_zones)
    lze = float((per_size * s**2).sum() / n_zones)
    gln = float((per_level**2).sum() / n_zones)
    szn = float((per_size**2).sum() / n_zones)
    zone_percentage = float(n_zones / num_pixels)
    lgze = float((per_level / i**2).sum() / n_zones)
    hgze = float((per_level * i**2).sum() / n_zones)
    szlge = float((p / (gi**2 * gs**2)).sum() / n_zones)
    szhge = float((p * gi**2 / gs**2).sum() / n_zones)
    lzlge = float((p * gs**2 / gi**2).sum() / n_zones)
    lzhge = float((p * gi**2 * gs**2).sum() / n_zones)
    mu_level = (per_level * i).sum() / n_zones
    glv = float((per_level * (i - mu_level) ** 2).sum() / n_zones)
    mu_size = (per_size * s).sum() / n_zones
    szv = float((per_size * (s - mu_size) ** 2).sum() / n_zones)

    return FeatureVector(
        "GLSZM",
        np.array(
            [sze, lze, gln, szn, zone_percentage, lgze, hgze, szlge, szhge, lzlge, lzhge, glv, szv]
        ),
    )
