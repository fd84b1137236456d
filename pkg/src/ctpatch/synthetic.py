"""Seeded two-class texture corpus for experiments and end-to-end tests.

The infected class is smooth low-frequency blobs (a coarse random grid blurred
up to patch resolution); the clean class is per-pixel uniform speckle.  The
two differ strongly in co-occurrence statistics, so texture features separate
them while per-pixel codes carry almost no signal.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import uniform_filter, zoom

from .imaging import CORONAVIRUS, NON_CORONAVIRUS, GrayImage, LabelMask, Patch


def smooth_patch(rng: np.random.Generator, size: int) -> np.ndarray:
    coarse = rng.uniform(40.0, 215.0, size=(4, 4))
    fine = zoom(coarse, size / 4.0, order=1)
    fine = uniform_filter(fine, size=max(3, size // 8), mode="reflect")
    fine += rng.normal(0.0, 2.0, size=fine.shape)
    return np.clip(np.rint(fine), 0, 255).astype(np.uint8)


def speckle_patch(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.integers(0, 256, size=(size, size), dtype=np.int64).astype(np.uint8)


def make_texture_corpus(
    n_per_class: int = 500, size: int = 32, seed: int = 0
) -> tuple[list[Patch], list[str]]:
    """Blob patches labeled infected, speckle patches labeled clean."""
    rng = np.random.default_rng(seed)
    patches: list[Patch] = []
    for i in range(n_per_class):
        patches.append(
            Patch(
                pixels=smooth_patch(rng, size),
                label=CORONAVIRUS,
                source_id="synthetic-blob",
                origin=(i, 0),
            )
        )
    for i in range(n_per_class):
        patches.append(
            Patch(
                pixels=speckle_patch(rng, size),
                label=NON_CORONAVIRUS,
                source_id="synthetic-speckle",
                origin=(i, 0),
            )
        )
    return patches, [p.label for p in patches]


def make_composite_image(
    tiles_per_side: int = 8, patch_size: int = 32, seed: int = 0
) -> tuple[GrayImage, LabelMask]:
    """A tiled demo image: left half blobs (infected), right half speckle."""
    rng = np.random.default_rng(seed)
    side = tiles_per_side * patch_size
    pixels = np.zeros((side, side), dtype=np.uint8)
    labels = np.zeros((side, side), dtype=np.uint8)
    for tr in range(tiles_per_side):
        for tc in range(tiles_per_side):
            r, c = tr * patch_size, tc * patch_size
            if tc < tiles_per_side // 2:
                pixels[r : r + patch_size, c : c + patch_size] = smooth_patch(rng, patch_size)
                labels[r : r + patch_size, c : c + patch_size] = 1
            else:
                pixels[r : r + patch_size, c : c + patch_size] = speckle_patch(rng, patch_size)
    return GrayImage(pixels), LabelMask(labels)
