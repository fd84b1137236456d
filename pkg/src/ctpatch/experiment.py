"""Experiment orchestration: manifests -> features -> CV grid -> report.

One report row per (subset, extractor, k) cell.  Feature matrices are cached
as CSV keyed by manifest content and feature config, so reruns that only
change SVM parameters skip extraction.  Every cell derives its own seed from
the experiment seed and the cell key, which keeps results independent of
execution order.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from ._version import __version__
from .errors import (
    ConfigError,
    CorruptFileError,
    ExperimentCellError,
    ModelMismatchError,
    PipelineError,
)
from .evaluation import cross_validate
from .features import (
    EXTRACTORS,
    FeatureConfig,
    FeatureTable,
    _extract_pixels,
    extract,
    read_features_csv,
    write_features_csv,
)
from .imaging import CORONAVIRUS, load_gray_image, load_patches, read_manifest, write_pgm
from .reporting import ExperimentReport, ReportRow, render_csv, render_markdown, report_to_dict
from .svm import SvmParams, ensemble_vote, load_ensemble, save_ensemble

VALID_KS = (2, 5, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    subsets: dict[str, str]  # subset name -> manifest path
    extractors: tuple[str, ...] = EXTRACTORS
    ks: tuple[int, ...] = VALID_KS
    features: FeatureConfig = FeatureConfig()
    svm: SvmParams = SvmParams()
    seed: int = 0
    output_dir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        if not self.subsets:
            raise ConfigError("config needs at least one subset manifest")
        object.__setattr__(self, "extractors", tuple(self.extractors))
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        unknown = sorted(set(self.extractors) - set(EXTRACTORS))
        if not self.extractors or unknown:
            raise ConfigError(f"extractors must be a nonempty subset of {EXTRACTORS}; bad: {unknown}")
        bad_ks = sorted(set(self.ks) - set(VALID_KS))
        if not self.ks or bad_ks:
            raise ConfigError(f"ks must be a nonempty subset of {VALID_KS}; bad: {bad_ks}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")

    def to_dict(self) -> dict:
        return {
            "subsets": dict(self.subsets),
            "extractors": list(self.extractors),
            "ks": list(self.ks),
            "features": asdict(self.features),
            "svm": {
                "kernel": self.svm.kernel,
                "C": self.svm.C,
                "gamma": self.svm.gamma,
                "tol": self.svm.tol,
                "max_passes": self.svm.max_passes,
            },
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    def fingerprint(self) -> str:
        payload = self.to_dict()
        payload.pop("output_dir")  # where results land does not define the experiment
        canonical = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        try:
            features = FeatureConfig(**payload.get("features", {}))
            svm_fields = payload.get("svm", {})
            svm = SvmParams(
                kernel=svm_fields.get("kernel", "linear"),
                C=float(svm_fields.get("C", 1.0)),
                gamma=svm_fields.get("gamma"),
                tol=float(svm_fields.get("tol", 1e-3)),
                max_passes=int(svm_fields.get("max_passes", 10)),
            )
            return cls(
                subsets=dict(payload["subsets"]),
                extractors=tuple(payload.get("extractors", EXTRACTORS)),
                ks=tuple(payload.get("ks", VALID_KS)),
                features=features,
                svm=svm,
                seed=int(payload.get("seed", 0)),
                output_dir=payload.get("output_dir", "out"),
                jobs=int(payload.get("jobs", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed experiment config: {exc}") from exc

    @classmethod
    def from_json_file(cls, path: str) -> "ExperimentConfig":
        if not os.path.exists(path):
            raise FileNotFoundError(path)
        with open(path, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid config JSON") from exc
        return cls.from_dict(payload)


def cell_seed(seed: int, subset: str, extractor: str, k: int) -> int:
    """Deterministic per-cell seed, independent of cell execution order."""
    digest = hashlib.sha256(f"{seed}:{subset}:{extractor}:{k}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**31)


def _subset_features(
    subset: str, manifest_path: str, extractor: str, config: ExperimentConfig
) -> FeatureTable:
    """Compute (or load cached) features for one subset/extractor pair."""
    cache_dir = os.path.join(config.output_dir, "cache")
    os.makedirs(cache_dir, exist_ok=True)
    with open(manifest_path, "rb") as fh:
        manifest_digest = hashlib.sha256(fh.read()).hexdigest()[:16]
    key = f"{subset}__{extractor}__{config.features.fingerprint()}__{manifest_digest}"
    cache_path = os.path.join(cache_dir, f"{key}.csv")
    if os.path.exists(cache_path):
        try:
            return read_features_csv(cache_path)
        except CorruptFileError:
            os.remove(cache_path)

    manifest = read_manifest(manifest_path)
    patches = load_patches(manifest)
    matrix = np.stack(
        [extract(p, extractor, config.features).values for p in patches]
    )
    table = FeatureTable(
        extractor=extractor,
        config=config.features,
        patch_paths=tuple(e.path for e in manifest.entries),
        labels=tuple(p.label for p in patches),
        matrix=matrix,
    )
    write_features_csv(cache_path, table)
    return table


def _run_cell(
    subset: str, extractor: str, k: int, table: FeatureTable, config: ExperimentConfig
) -> ReportRow:
    seed = cell_seed(config.seed, subset, extractor, k)
    summary, ensemble = cross_validate(
        table.matrix,
        list(table.labels),
        k,
        replace(config.svm, seed=seed),
        seed=seed,
    )
    models_dir = os.path.join(config.output_dir, "models")
    os.makedirs(models_dir, exist_ok=True)
    save_ensemble(ensemble, os.path.join(models_dir, f"{subset}__{extractor}__{k}fold.json"))
    return ReportRow(
        subset=subset,
        extractor=extractor,
        n_features=int(table.matrix.shape[1]),
        k=k,
        summary=summary,
    )


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full (subset x extractor x k) grid and persist the report."""
    for subset, manifest_path in sorted(config.subsets.items()):
        if not os.path.exists(manifest_path):
            raise FileNotFoundError(f"subset {subset!r}: manifest not found: {manifest_path}")
    os.makedirs(config.output_dir, exist_ok=True)
    extractor_order = [e for e in EXTRACTORS if e in config.extractors]
    ks = sorted(config.ks)

    tasks = []  # (subset, extractor, k, table)
    for subset in sorted(config.subsets):
        manifest_path = config.subsets[subset]
        for extractor in extractor_order:
            try:
                table = _subset_features(subset, manifest_path, extractor, config)
            except PipelineError as exc:
                raise ExperimentCellError(subset, extractor, ks[0], exc) from exc
            for k in ks:
                tasks.append((subset, extractor, k, table))

    def run_task(task):
        subset, extractor, k, table = task
        try:
            return _run_cell(subset, extractor, k, table, config)
        except PipelineError as exc:
            raise ExperimentCellError(subset, extractor, k, exc) from exc

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(run_task, tasks))
    else:
        rows = [run_task(task) for task in tasks]

    report = ExperimentReport(
        rows=tuple(rows),
        config_fingerprint=config.fingerprint(),
        seed=config.seed,
        version=__version__,
    )
    payload = report_to_dict(report)
    # echoed for reproducibility; output_dir is location, not experiment identity
    payload["config"] = {k: v for k, v in config.to_dict().items() if k != "output_dir"}
    with open(os.path.join(config.output_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(config.output_dir, "report.md"), "w", encoding="utf-8") as fh:
        fh.write(render_markdown(report))
    with open(os.path.join(config.output_dir, "report.csv"), "w", encoding="utf-8") as fh:
        fh.write(render_csv(report))
    return report


@dataclass(frozen=True)
class TileResult:
    origin: tuple[int, int]
    label: str
    mean_decision: float


def classify_image(
    image_path: str,
    ensemble_path: str,
    extractor: str,
    feature_config: FeatureConfig = FeatureConfig(),
    patch_size: int = 32,
    out_dir: str | None = None,
) -> list[TileResult]:
    """Tile an image, vote each tile through the ensemble, emit the overlay.

    Writes `classification.csv` (origins, labels, mean decision values) and
    `infected_mask.pgm` (255 on infected tiles) when out_dir is given.
    """
    if extractor not in EXTRACTORS:
        raise ConfigError(f"unknown extractor {extractor!r}")
    ensemble = load_ensemble(ensemble_path)
    image = load_gray_image(image_path)
    if patch_size < 1 or patch_size > min(image.height, image.width):
        raise ConfigError(f"patch size {patch_size} does not fit the image")

    results = []
    mask = np.zeros((image.height, image.width), dtype=np.uint8)
    for row in range(0, image.height - patch_size + 1, patch_size):
        for col in range(0, image.width - patch_size + 1, patch_size):
            tile = image.pixels[row : row + patch_size, col : col + patch_size]
            vector = _extract_pixels(tile, extractor, feature_config)
            if vector.length != ensemble.dim:
                raise ModelMismatchError(
                    f"{extractor} produced {vector.length} features but the ensemble"
                    f" expects {ensemble.dim}"
                )
            label, mean_value = ensemble_vote(ensemble, vector.values)
            if label == CORONAVIRUS:
                mask[row : row + patch_size, col : col + patch_size] = 255
            results.append(TileResult(origin=(row, col), label=label, mean_decision=mean_value))

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "classification.csv"), "w", encoding="utf-8") as fh:
            fh.write("row,col,size,label,mean_decision\n")
            for res in results:
                fh.write(
                    f"{res.origin[0]},{res.origin[1]},{patch_size},"
                    f"{res.label},{res.mean_decision!r}\n"
                )
        write_pgm(os.path.join(out_dir, "infected_mask.pgm"), mask)
    return results
