"""Gray-level co-occurrence matrix and its 19 texture statistics.

Conventions, fixed so outputs are reproducible across runs and machines:

- gray-level indices are the quantized pixel values themselves (0-based);
- pairs accumulate symmetrically (both (a, b) and (b, a)) and the matrix is
  normalized to probabilities;
- logarithms are base 2 with the 0 * log(0) = 0 convention;
- sum variance is centered on sum average;
- correlation and both information measures of correlation are defined as 0
  when a marginal standard deviation or the denominator entropy is 0, which
  happens on constant patches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LevelOverflowError, UnnormalizedMatrixError
from .base import FeatureVector

DIRECTION_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}

GLCM_FEATURE_NAMES = (
    "angular_second_moment",
    "contrast",
    "correlation",
    "sum_of_squares_variance",
    "inverse_difference_moment",
    "sum_average",
    "sum_variance",
    "sum_entropy",
    "entropy",
    "difference_entropy",
    "difference_variance",
    "info_measure_correlation_1",
    "info_measure_correlation_2",
    "autocorrelation",
    "dissimilarity",
    "cluster_shade",
    "cluster_prominence",
    "maximum_probability",
    "inverse_difference",
)


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    counts: np.ndarray  # (levels, levels) float64
    levels: int
    displacement: int
    theta: int
    normalized: bool


def _check_levels(pixels: np.ndarray, levels: int) -> np.ndarray:
    p = np.asarray(pixels)
    if p.size and (int(p.max()) >= levels or int(p.min()) < 0):
        raise LevelOverflowError(
            f"pixel values span [{int(p.min())}, {int(p.max())}] but levels={levels}"
        )
    return p.astype(np.int64)


def _offset(displacement: int, theta: int) -> tuple[int, int]:
    if theta not in DIRECTION_OFFSETS:
        raise ValueError(f"theta must be one of {sorted(DIRECTION_OFFSETS)}, got {theta}")
    if displacement < 1:
        raise ValueError(f"displacement must be >= 1, got {displacement}")
    dr, dc = DIRECTION_OFFSETS[theta]
    return dr * displacement, dc * displacement


def co_occurrence_counts(
    pixels: np.ndarray, levels: int, displacement: int = 1, theta: int = 0
) -> np.ndarray:
    """Symmetric integer pair counts at the given displacement and angle."""
    p = _check_levels(pixels, levels)
    dr, dc = _offset(displacement, theta)
    h, w = p.shape
    r0, c0 = max(0, -dr), max(0, -dc)
    r1, c1 = h - max(0, dr), w - max(0, dc)
    counts = np.zeros((levels, levels), dtype=np.int64)
    if r1 > r0 and c1 > c0:
        a = p[r0:r1, c0:c1].ravel()
        b = p[r0 + dr : r1 + dr, c0 + dc : c1 + dc].ravel()
        np.add.at(counts, (a, b), 1)
    return counts + counts.T


def build_glcm(
    pixels: np.ndarray, levels: int, displacement: int = 1, theta: int = 0
) -> CooccurrenceMatrix:
    """Probability-normalized symmetric co-occurrence matrix of a quantized patch."""
    counts = co_occurrence_counts(pixels, levels, displacement, theta)
    total = counts.sum()
    norm = counts.astype(np.float64) / total if total else counts.astype(np.float64)
    return CooccurrenceMatrix(
        counts=norm, levels=levels, displacement=displacement, theta=theta, normalized=True
    )


def _entropy_bits(q: np.ndarray) -> float:
    nz = q[q > 0]
    return float(-(nz * np.log2(nz)).sum())


def glcm_features(matrix: CooccurrenceMatrix) -> FeatureVector:
    """The 19 co-occurrence statistics, in the documented order."""
    if not matrix.normalized:
        raise UnnormalizedMatrixError("glcm_features needs a normalized matrix")
    p = np.asarray(matrix.counts, dtype=np.float64)
    if abs(p.sum() - 1.0) > 1e-9:
        raise UnnormalizedMatrixError(f"matrix sums to {p.sum()!r}, expected 1")

    levels = matrix.levels
    idx = np.arange(levels, dtype=np.float64)
    gi, gj = np.meshgrid(idx, idx, indexing="ij")

    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu_x = float((idx * px).sum())
    mu_y = float((idx * py).sum())
    sd_x = float(np.sqrt(((idx - mu_x) ** 2 * px).sum()))
    sd_y = float(np.sqrt(((idx - mu_y) ** 2 * py).sum()))

    k_sum = np.arange(2 * levels - 1, dtype=np.float64)
    p_sum = np.zeros(2 * levels - 1)
    np.add.at(p_sum, (gi + gj).astype(np.intp).ravel(), p.ravel())
    k_diff = np.arange(levels, dtype=np.float64)
    p_diff = np.zeros(levels)
    np.add.at(p_diff, np.abs(gi - gj).astype(np.intp).ravel(), p.ravel())

    asm = float((p**2).sum())
    contrast = float((k_diff**2 * p_diff).sum())
    denom = sd_x * sd_y
    correlation = float(((gi * gj * p).sum() - mu_x * mu_y) / denom) if denom > 0 else 0.0
    variance = float(((gi - mu_x) ** 2 * p).sum())
    idm = float((p / (1.0 + (gi - gj) ** 2)).sum())
    sum_average = float((k_sum * p_sum).sum())
    sum_variance = float(((k_sum - sum_average) ** 2 * p_sum).sum())
    sum_entropy = _entropy_bits(p_sum)
    entropy = _entropy_bits(p)
    diff_entropy = _entropy_bits(p_diff)
    diff_mean = float((k_diff * p_diff).sum())
    diff_variance = float(((k_diff - diff_mean) ** 2 * p_diff).sum())

    hx = _entropy_bits(px)
    hy = _entropy_bits(py)
    pxpy = np.outer(px, py)
    joint_nz = p > 0
    hxy1 = float(-(p[joint_nz] * np.log2(pxpy[joint_nz])).sum())
    hxy2 = _entropy_bits(pxpy)
    h_max = max(hx, hy)
    imc1 = float((entropy - hxy1) / h_max) if h_max > 0 else 0.0
    imc2 = float(np.sqrt(max(0.0, 1.0 - np.exp(-2.0 * (hxy2 - entropy)))))

    autocorrelation = float((gi * gj * p).sum())
    dissimilarity = float((np.abs(gi - gj) * p).sum())
    spread = gi + gj - mu_x - mu_y
    cluster_shade = float((spread**3 * p).sum())
    cluster_prominence = float((spread**4 * p).sum())
    maximum_probability = float(p.max())
    inverse_difference = float((p / (1.0 + np.abs(gi - gj))).sum())

    return FeatureVector(
        "GLCM",
        np.array(
            [
                asm,
                contrast,
                correlation,
                variance,
                idm,
                sum_average,
                sum_variance,
                sum_entropy,
                entropy,
                diff_entropy,
                diff_variance,
                imc1,
                imc2,
                autocorrelation,
                dissimilarity,
                cluster_shade,
                cluster_prominence,
                maximum_probability,
                inverse_difference,
            ]
        ),
    )
