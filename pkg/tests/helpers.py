"""Shared dataset builders for the test suite."""

from __future__ import annotations

import numpy as np

from ctpatch.imaging import CORONAVIRUS, NON_CORONAVIRUS, Patch


def separable_blobs(
    rng: np.random.Generator, n_per_class: int, dim: int, separation: float = 6.0
) -> tuple[np.ndarray, np.ndarray]:
    """Two tight Gaussian blobs far enough apart that C=1 never binds."""
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    pos = rng.normal(0.0, 0.5, size=(n_per_class, dim)) + separation / 2 * direction
    neg = rng.normal(0.0, 0.5, size=(n_per_class, dim)) - separation / 2 * direction
    x = np.vstack([pos, neg])
    y = np.concatenate([np.ones(n_per_class), -np.ones(n_per_class)])
    return x, y


def random_patch(rng: np.random.Generator, max_side: int = 8, levels: int = 4) -> np.ndarray:
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    return rng.integers(0, levels, size=(h, w)).astype(np.uint8)


def labeled_feature_set(
    rng: np.random.Generator, n_per_class: int, dim: int, separation: float = 6.0
) -> tuple[np.ndarray, list[str]]:
    """separable_blobs with string labels, positives first."""
    x, y = separable_blobs(rng, n_per_class, dim, separation)
    labels = [CORONAVIRUS if v > 0 else NON_CORONAVIRUS for v in y]
    return x, labels


def make_patch(pixels: np.ndarray, label: str = CORONAVIRUS) -> Patch:
    return Patch(pixels=np.asarray(pixels, dtype=np.uint8), label=label)
