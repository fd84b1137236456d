"""One-level 2-D Haar decomposition with orthonormal filters.

Filters h = [1/sqrt(2), 1/sqrt(2)] and g = [1/sqrt(2), -1/sqrt(2)] applied
along rows then columns.  Orthonormality makes total energy identical across
the four sub-bands and the input, and the transform exactly invertible.
"""

from __future__ import annotations

import numpy as np

from ..errors import OddDimensionsError
from .base import FeatureVector

_SQRT2 = np.sqrt(2.0)


def haar_decompose(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split into (ll, lh, hl, hh) sub-bands, each half the input size.

    ll: approximation, lh: horizontal detail, hl: vertical detail,
    hh: diagonal detail.
    """
    x = np.asarray(pixels, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {x.shape}")
    h, w = x.shape
    if h % 2 or w % 2 or h == 0 or w == 0:
        raise OddDimensionsError(f"Haar decomposition needs even dimensions, got {h}x{w}")

    lo = (x[:, 0::2] + x[:, 1::2]) / _SQRT2
    hi = (x[:, 0::2] - x[:, 1::2]) / _SQRT2
    ll = (lo[0::2, :] + lo[1::2, :]) / _SQRT2
    lh = (lo[0::2, :] - lo[1::2, :]) / _SQRT2
    hl = (hi[0::2, :] + hi[1::2, :]) / _SQRT2
    hh = (hi[0::2, :] - hi[1::2, :]) / _SQRT2
    return ll, lh, hl, hh


def haar_reconstruct(
    ll: np.ndarray, lh: np.ndarray, hl: np.ndarray, hh: np.ndarray
) -> np.ndarray:
    """Exact inverse of haar_decompose."""
    ll, lh, hl, hh = (np.asarray(a, dtype=np.float64) for a in (ll, lh, hl, hh))
    if not ll.shape == lh.shape == hl.shape == hh.shape:
        raise ValueError("sub-band shapes differ")
    hh_rows, hh_cols = ll.shape
    lo = np.empty((2 * hh_rows, hh_cols))
    hi = np.empty((2 * hh_rows, hh_cols))
    lo[0::2, :] = (ll + lh) / _SQRT2
    lo[1::2, :] = (ll - lh) / _SQRT2
    hi[0::2, :] = (hl + hh) / _SQRT2
    hi[1::2, :] = (hl - hh) / _SQRT2
    x = np.empty((2 * hh_rows, 2 * hh_cols))
    x[:, 0::2] = (lo + hi) / _SQRT2
    x[:, 1::2] = (lo - hi) / _SQRT2
    return x


def dwt_ll(pixels: np.ndarray) -> FeatureVector:
    """Row-major approximation coefficients of a one-level Haar decomposition."""
    ll, _, _, _ = haar_decompose(pixels)
    return FeatureVector("DWT", ll.ravel())
