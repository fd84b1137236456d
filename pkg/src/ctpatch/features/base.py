"""Shared feature-vector container and extractor configuration."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteFeatureError

EXTRACTORS = ("RAW", "GLCM", "LDP", "GLRLM", "GLSZM", "DWT")


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs shared by the matrix-based extractors.

    levels:       gray levels for GLCM/GLRLM/GLSZM quantization
    displacement: co-occurrence pair distance
    theta:        direction in degrees, one of 0/45/90/135
    connectivity: zone adjacency, 4 or 8
    """

    levels: int = 32
    displacement: int = 1
    theta: int = 0
    connectivity: int = 8

    def fingerprint(self) -> str:
        text = (
            f"levels={self.levels} d={self.displacement} "
            f"theta={self.theta} connectivity={self.connectivity}"
        )
        return hashlib.sha256(text.encode("ascii")).hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Ordered real-valued features plus the tag of the extractor that made them."""

    extractor: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if vals.size == 0:
            raise NonFiniteFeatureError(f"{self.extractor}: empty feature vector")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFeatureError(f"{self.extractor}: non-finite feature value")
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return int(self.values.size)


def expected_length(extractor: str, size: int) -> int:
    """Feature count each extractor produces for a size x size patch."""
    if extractor == "RAW" or extractor == "LDP":
        return size * size
    if extractor == "GLCM":
        return 19
    if extractor == "GLRLM":
        return 7
    if extractor == "GLSZM":
        return 13
    if extractor == "DWT":
        return (size // 2) * (size // 2)
    from ..errors import UnknownExtractorError

    raise UnknownExtractorError(f"unknown extractor {extractor!r}")
