"""Grayscale image IO, quantization, and labeled patch extraction.

Images enter as 8-bit grayscale PNG or PGM (P5).  Patches are cut on a
non-overlapping grid anchored at (0, 0): a tile is kept with the label whose
mask fraction reaches the purity threshold and discarded otherwise; partial
edge tiles are discarded rather than padded.  Patches persist as PGM files
plus a JSON manifest.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptFileError,
    CorruptImageError,
    DimensionMismatchError,
    EmptyInputError,
    InvalidLevelCountError,
    MixedPatchSizesError,
    PatchTooLargeError,
    UnsupportedFormatError,
)

CORONAVIRUS = "coronavirus"
NON_CORONAVIRUS = "non-coronavirus"
LABELS = (CORONAVIRUS, NON_CORONAVIRUS)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """2-D grid of 8-bit intensities, row-major."""

    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise CorruptImageError(f"expected a non-empty 2-D pixel grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise CorruptImageError("intensities outside [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", np.ascontiguousarray(px))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class LabelMask:
    """Per-pixel ground truth paired with a GrayImage: 1 = infected, 0 = not."""

    labels: np.ndarray  # (height, width) uint8, values in {0, 1}

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 2 or lab.size == 0:
            raise CorruptImageError(f"expected a non-empty 2-D label grid, got shape {lab.shape}")
        # Any nonzero mask value counts as infected.
        lab = (lab != 0).astype(np.uint8)
        object.__setattr__(self, "labels", np.ascontiguousarray(lab))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True, eq=False)
class Patch:
    """Square labeled sub-image with provenance back to its source."""

    pixels: np.ndarray  # (size, size) uint8
    label: str
    source_id: str = ""
    origin: tuple[int, int] = (0, 0)  # (row, col) of the top-left corner

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] != px.shape[1] or px.size == 0:
            raise DimensionMismatchError(f"patch pixels must be square, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise CorruptImageError("patch intensities outside [0, 255]")
            px = px.astype(np.uint8)
        if self.label not in LABELS:
            raise ValueError(f"unknown patch label {self.label!r}")
        object.__setattr__(self, "pixels", np.ascontiguousarray(px))
        object.__setattr__(self, "origin", (int(self.origin[0]), int(self.origin[1])))

    @property
    def size(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # relative to the manifest's directory
    label: str
    source_id: str
    origin: tuple[int, int]
    size: int


@dataclass(frozen=True)
class SubsetManifest:
    """Index of the persisted patches of one subset."""

    patch_size: int
    entries: tuple[ManifestEntry, ...]
    root: str  # directory the entry paths are relative to

    def class_counts(self) -> dict[str, int]:
        counts = {label: 0 for label in LABELS}
        for entry in self.entries:
            counts[entry.label] += 1
        return counts


# --- file IO ----------------------------------------------------------------

def _read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise UnsupportedFormatError(f"{path}: not a binary PGM (P5) file")
    # Header: magic, width, height, maxval; '#' comments allowed between tokens.
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise CorruptImageError(f"{path}: malformed PGM header")
        fields.append(int(token))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval > 255:
        raise UnsupportedFormatError(f"{path}: {maxval}-level PGM is not 8-bit")
    if width <= 0 or height <= 0 or maxval <= 0:
        raise CorruptImageError(f"{path}: malformed PGM header")
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise CorruptImageError(f"{path}: truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path: str, pixels: np.ndarray) -> None:
    px = np.asarray(pixels, dtype=np.uint8)
    if px.ndim != 2:
        raise DimensionMismatchError(f"PGM output needs 2-D pixels, got shape {px.shape}")
    header = f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(px.tobytes())


def _read_png(path: str) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise UnsupportedFormatError(
                    f"{path}: PNG mode {img.mode!r} is not 8-bit grayscale; convert before use"
                )
            return np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise CorruptImageError(f"{path}: undecodable PNG") from exc


def load_gray_image(path: str) -> GrayImage:
    """Load an 8-bit grayscale PNG or PGM (P5); color inputs are rejected."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    ext = os.path.splitext(path)[1].lower()
    if ext == ".pgm":
        return GrayImage(_read_pgm(path))
    if ext == ".png":
        return GrayImage(_read_png(path))
    raise UnsupportedFormatError(f"{path}: expected a .png or .pgm file")


def load_label_mask(path: str) -> LabelMask:
    """Load a mask image; any nonzero pixel marks the infected class."""
    return LabelMask(load_gray_image(path).pixels)


# --- operations ---------------------------------------------------------------

def quantize(img: GrayImage | np.ndarray, levels: int) -> np.ndarray:
    """Map 8-bit intensities onto [0, levels-1] via p -> floor(p * levels / 256)."""
    if not isinstance(levels, (int, np.integer)) or not 2 <= int(levels) <= 256:
        raise InvalidLevelCountError(f"levels must be an integer in [2, 256], got {levels!r}")
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img)
    if np.any(pixels < 0) or np.any(pixels > 255):
        raise CorruptImageError("quantize input outside [0, 255]")
    return ((pixels.astype(np.int64) * int(levels)) // 256).astype(np.uint8)


def extract_patches(
    img: GrayImage,
    mask: LabelMask,
    size: int,
    purity: float = 0.9,
    source_id: str = "",
) -> list[Patch]:
    """Cut the non-overlapping size-aligned grid and keep class-pure tiles.

    A tile is infected when >= purity of its mask pixels are 1, clean when
    >= purity are 0, and discarded otherwise.  Purity must exceed 0.5 so the
    two tests cannot both pass.
    """
    if (img.height, img.width) != (mask.height, mask.width):
        raise DimensionMismatchError(
            f"image {img.height}x{img.width} vs mask {mask.height}x{mask.width}"
        )
    size = int(size)
    if size < 1 or size > min(img.height, img.width):
        raise PatchTooLargeError(
            f"patch size {size} does not fit a {img.height}x{img.width} image"
        )
    if not 0.5 < purity <= 1.0:
        raise ValueError(f"purity must be in (0.5, 1.0], got {purity}")

    patches: list[Patch] = []
    area = size * size
    for row in range(0, img.height - size + 1, size):
        for col in range(0, img.width - size + 1, size):
            ones = int(mask.labels[row : row + size, col : col + size].sum())
            if ones >= purity * area:
                label = CORONAVIRUS
            elif area - ones >= purity * area:
                label = NON_CORONAVIRUS
            else:
                continue
            patches.append(
                Patch(
                    pixels=img.pixels[row : row + size, col : col + size].copy(),
                    label=label,
                    source_id=source_id,
                    origin=(row, col),
                )
            )
    return patches


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_-]+", "-", text).strip("-")
    return cleaned or "patch"


def write_manifest(patches: list[Patch], directory: str) -> SubsetManifest:
    """Persist patches as PGM files plus a JSON manifest in `directory`."""
    if not patches:
        raise EmptyInputError("no patches to write")
    sizes = {p.size for p in patches}
    if len(sizes) > 1:
        raise MixedPatchSizesError(f"patch sizes differ: {sorted(sizes)}")
    os.makedirs(directory, exist_ok=True)

    entries = []
    for i, patch in enumerate(patches):
        name = f"{i:05d}_{_slug(patch.source_id)}_{patch.origin[0]}x{patch.origin[1]}.pgm"
        write_pgm(os.path.join(directory, name), patch.pixels)
        entries.append(
            ManifestEntry(
                path=name,
                label=patch.label,
                source_id=patch.source_id,
                origin=patch.origin,
                size=patch.size,
            )
        )

    payload = [
        {
            "path": e.path,
            "label": e.label,
            "source_id": e.source_id,
            "origin": list(e.origin),
            "size": e.size,
        }
        for e in entries
    ]
    with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return SubsetManifest(patch_size=sizes.pop(), entries=tuple(entries), root=directory)


def read_manifest(manifest_path: str) -> SubsetManifest:
    """Read a manifest JSON written by write_manifest."""
    if not os.path.exists(manifest_path):
        raise FileNotFoundError(manifest_path)
    with open(manifest_path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorruptFileError(f"{manifest_path}: invalid manifest JSON") from exc
    if not isinstance(payload, list) or not payload:
        raise EmptyInputError(f"{manifest_path}: manifest holds no entries")

    entries = []
    for item in payload:
        try:
            entries.append(
                ManifestEntry(
                    path=item["path"],
                    label=item["label"],
                    source_id=item.get("source_id", ""),
                    origin=(int(item["origin"][0]), int(item["origin"][1])),
                    size=int(item["size"]),
                )
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise CorruptFileError(f"{manifest_path}: malformed manifest entry") from exc
        if entries[-1].label not in LABELS:
            raise CorruptFileError(f"{manifest_path}: unknown label {entries[-1].label!r}")
    sizes = {e.size for e in entries}
    if len(sizes) > 1:
        raise MixedPatchSizesError(f"{manifest_path}: patch sizes differ: {sorted(sizes)}")
    return SubsetManifest(
        patch_size=sizes.pop(), entries=tuple(entries), root=os.path.dirname(manifest_path)
    )


def load_patches(manifest: SubsetManifest) -> list[Patch]:
    """Materialize every manifest entry back into a Patch."""
    patches = []
    for entry in manifest.entries:
        pixels = _read_pgm(os.path.join(manifest.root, entry.path))
        if pixels.shape != (entry.size, entry.size):
            raise DimensionMismatchError(
                f"{entry.path}: expected {entry.size}x{entry.size}, got {pixels.shape}"
            )
        patches.append(
            Patch(pixels=pixels, label=entry.label, source_id=entry.source_id, origin=entry.origin)
        )
    return patches
