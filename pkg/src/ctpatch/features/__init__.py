"""Patch feature extraction: five texture families plus raw vectorization.

Feature lengths for a size x size patch:

    RAW   size^2        flattened intensities / 255
    GLCM  19            co-occurrence statistics
    LDP   size^2        flattened neighbor-sign codes / 255
    GLRLM 7             run-length statistics
    GLSZM 13            size-zone statistics
    DWT   (size/2)^2    Haar approximation coefficients
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from ..errors import UnknownExtractorError
from ..imaging import LABELS, Patch, quantize
from .base import EXTRACTORS, FeatureConfig, FeatureVector, expected_length
from .glcm import (
    GLCM_FEATURE_NAMES,
    CooccurrenceMatrix,
    build_glcm,
    co_occurrence_counts,
    glcm_features,
)
from .glrlm import GLRLM_FEATURE_NAMES, RunLengthMatrix, build_glrlm, glrlm_features
from .glszm import GLSZM_FEATURE_NAMES, SizeZoneMatrix, build_glszm, glszm_features
from .ldp import ldp_map, ldp_vector
from .wavelet import dwt_ll, haar_decompose, haar_reconstruct

__all__ = [
    "EXTRACTORS",
    "FeatureConfig",
    "FeatureVector",
    "FeatureTable",
    "expected_length",
    "CooccurrenceMatrix",
    "RunLengthMatrix",
    "SizeZoneMatrix",
    "GLCM_FEATURE_NAMES",
    "GLRLM_FEATURE_NAMES",
    "GLSZM_FEATURE_NAMES",
    "co_occurrence_counts",
    "build_glcm",
    "glcm_features",
    "build_glrlm",
    "glrlm_features",
    "build_glszm",
    "glszm_features",
    "ldp_map",
    "ldp_vector",
    "haar_decompose",
    "haar_reconstruct",
    "dwt_ll",
    "raw_vector",
    "extract",
    "feature_names",
    "write_features_csv",
    "read_features_csv",
]


def raw_vector(patch: Patch) -> FeatureVector:
    """Row-major flattened intensities rescaled to [0, 1]."""
    return FeatureVector("RAW", patch.pixels.ravel().astype(np.float64) / 255.0)


def _extract_pixels(pixels: np.ndarray, extractor: str, config: FeatureConfig) -> FeatureVector:
    if extractor == "RAW":
        return FeatureVector("RAW", np.asarray(pixels).ravel().astype(np.float64) / 255.0)
    if extractor == "GLCM":
        q = quantize(pixels, config.levels)
        return glcm_features(build_glcm(q, config.levels, config.displacement, config.theta))
    if extractor == "LDP":
        return ldp_vector(pixels)
    if extractor == "GLRLM":
        q = quantize(pixels, config.levels)
        return glrlm_features(build_glrlm(q, config.levels, config.theta), int(q.size))
    if extractor == "GLSZM":
        q = quantize(pixels, config.levels)
        return glszm_features(build_glszm(q, config.levels, config.connectivity), int(q.size))
    if extractor == "DWT":
        return dwt_ll(pixels)
    raise UnknownExtractorError(f"unknown extractor {extractor!r}")


def extract(patch: Patch, extractor: str, config: FeatureConfig = FeatureConfig()) -> FeatureVector:
    """Route a patch through the named extractor; pure in (patch, config)."""
    vector = _extract_pixels(patch.pixels, extractor, config)
    want = expected_length(extractor, patch.size)
    if vector.length != want:
        raise AssertionError(
            f"{extractor} produced {vector.length} features for size {patch.size}, expected {want}"
        )
    return vector


def feature_names(extractor: str, size: int) -> list[str]:
    """Column names in the persisted order."""
    if extractor == "GLCM":
        return list(GLCM_FEATURE_NAMES)
    if extractor == "GLRLM":
        return list(GLRLM_FEATURE_NAMES)
    if extractor == "GLSZM":
        return list(GLSZM_FEATURE_NAMES)
    return [f"f{i:04d}" for i in range(expected_length(extractor, size))]


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Feature matrix plus per-row provenance, as persisted to CSV."""

    extractor: str
    config: FeatureConfig
    patch_paths: tuple[str, ...]
    labels: tuple[str, ...]
    matrix: np.ndarray  # (n_patches, n_features) float64


def write_features_csv(path: str, table: FeatureTable) -> None:
    """One row per patch; a leading comment line carries tag and config."""
    n, d = table.matrix.shape
    size = int(round(np.sqrt(d))) if table.extractor in ("RAW", "LDP") else 0
    names = (
        feature_names(table.extractor, size)
        if table.extractor in ("GLCM", "GLRLM", "GLSZM")
        else [f"f{i:04d}" for i in range(d)]
    )
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# extractor={table.extractor} levels={table.config.levels}"
            f" d={table.config.displacement} theta={table.config.theta}"
            f" connectivity={table.config.connectivity}\n"
        )
        writer = csv.writer(fh)
        writer.writerow(["patch_path", "label"] + names)
        for i in range(n):
            writer.writerow(
                [table.patch_paths[i], table.labels[i]]
                + [repr(v) for v in table.matrix[i].tolist()]
            )
    os.replace(tmp, path)


def read_features_csv(path: str) -> FeatureTable:
    """Inverse of write_features_csv."""
    from ..errors import CorruptFileError

    with open(path, "r", encoding="utf-8", newline="") as fh:
        meta_line = fh.readline().strip()
        if not meta_line.startswith("#"):
            raise CorruptFileError(f"{path}: missing feature-CSV metadata line")
        meta = dict(
            token.split("=", 1) for token in meta_line.lstrip("#").split() if "=" in token
        )
        try:
            extractor = meta["extractor"]
            config = FeatureConfig(
                levels=int(meta["levels"]),
                displacement=int(meta["d"]),
                theta=int(meta["theta"]),
                connectivity=int(meta["connectivity"]),
            )
        except (KeyError, ValueError) as exc:
            raise CorruptFileError(f"{path}: malformed feature-CSV metadata") from exc
        if extractor not in EXTRACTORS:
            raise UnknownExtractorError(f"{path}: unknown extractor {extractor!r}")
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["patch_path", "label"]:
            raise CorruptFileError(f"{path}: malformed feature-CSV header")
        paths, labels, rows = [], [], []
        for row in reader:
            if not row:
                continue
            if row[1] not in LABELS:
                raise CorruptFileError(f"{path}: unknown label {row[1]!r}")
            paths.append(row[0])
            labels.append(row[1])
            rows.append([float(v) for v in row[2:]])
    matrix = np.asarray(rows, dtype=np.float64)
    return FeatureTable(
        extractor=extractor,
        config=config,
        patch_paths=tuple(paths),
        labels=tuple(labels),
        matrix=matrix,
    )
