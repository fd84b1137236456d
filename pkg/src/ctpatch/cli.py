"""Command-line interface.

Subcommands:
    run       full experiment from a JSON config (grid of subsets/extractors/ks)
    patches   image + mask -> labeled patch files + manifest
    features  manifest -> feature CSV
    cv        feature CSV -> cross-validation summary + fold-model ensemble
    classify  image + ensemble -> per-tile labels and infected-tile mask
    report    report JSON -> markdown or CSV table

Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._version import __version__
from .errors import ConfigError, DataError, ExperimentCellError, NumericError, PipelineError
from .evaluation import METRIC_NAMES, cross_validate
from .experiment import ExperimentConfig, classify_image, run_experiment
from .features import (
    EXTRACTORS,
    FeatureConfig,
    FeatureTable,
    extract,
    read_features_csv,
    write_features_csv,
)
from .imaging import extract_patches, load_gray_image, load_label_mask, load_patches, read_manifest, write_manifest
from .reporting import metricset_to_dict, render, report_from_dict
from .svm import SvmParams, save_ensemble

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _add_feature_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--levels", type=int, default=32, help="gray levels for GLCM/GLRLM/GLSZM")
    parser.add_argument("--displacement", type=int, default=1, help="co-occurrence pair distance")
    parser.add_argument("--theta", type=int, default=0, choices=(0, 45, 90, 135))
    parser.add_argument("--connectivity", type=int, default=8, choices=(4, 8))


def _feature_config(args: argparse.Namespace) -> FeatureConfig:
    return FeatureConfig(
        levels=args.levels,
        displacement=args.displacement,
        theta=args.theta,
        connectivity=args.connectivity,
    )


def cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    if args.jobs is not None:
        config = ExperimentConfig.from_dict({**config.to_dict(), "jobs": args.jobs})
    report = run_experiment(config)
    print(f"wrote {len(report.rows)} rows to {config.output_dir}/report.{{json,md,csv}}")
    return EXIT_OK


def cmd_patches(args: argparse.Namespace) -> int:
    image = load_gray_image(args.image)
    mask = load_label_mask(args.mask)
    source_id = args.source_id or os.path.splitext(os.path.basename(args.image))[0]
    patches = extract_patches(image, mask, args.size, purity=args.purity, source_id=source_id)
    manifest = write_manifest(patches, args.out)
    counts = manifest.class_counts()
    print(f"wrote {len(patches)} patches to {args.out} ({counts})")
    return EXIT_OK


def cmd_features(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    patches = load_patches(manifest)
    config = _feature_config(args)
    matrix = np.stack([extract(p, args.extractor, config).values for p in patches])
    table = FeatureTable(
        extractor=args.extractor,
        config=config,
        patch_paths=tuple(e.path for e in manifest.entries),
        labels=tuple(p.label for p in patches),
        matrix=matrix,
    )
    write_features_csv(args.out, table)
    print(f"wrote {matrix.shape[0]} x {matrix.shape[1]} feature matrix to {args.out}")
    return EXIT_OK


def cmd_cv(args: argparse.Namespace) -> int:
    table = read_features_csv(args.features)
    params = SvmParams(
        kernel=args.kernel,
        C=args.C,
        gamma=args.gamma,
        tol=args.tol,
        max_passes=args.max_passes,
        seed=args.seed,
    )
    summary, ensemble = cross_validate(
        table.matrix, list(table.labels), args.k, params, seed=args.seed
    )
    os.makedirs(args.out, exist_ok=True)
    save_ensemble(ensemble, os.path.join(args.out, "ensemble.json"))
    payload = {
        "k": args.k,
        "seed": args.seed,
        "extractor": table.extractor,
        "n_features": int(table.matrix.shape[1]),
        "per_fold": [metricset_to_dict(m) for m in summary.per_fold],
        "mean": metricset_to_dict(summary.mean),
        "std": metricset_to_dict(summary.std),
    }
    with open(os.path.join(args.out, "cv_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name in METRIC_NAMES:
        mean = getattr(summary.mean, name)
        std = getattr(summary.std, name)
        print(f"{name}: {mean * 100:.2f} ± {std * 100:.2f}")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    results = classify_image(
        args.image,
        args.ensemble,
        args.extractor,
        feature_config=_feature_config(args),
        patch_size=args.size,
        out_dir=args.out,
    )
    infected = sum(1 for r in results if r.label == "coronavirus")
    print(f"classified {len(results)} tiles, {infected} infected; overlay in {args.out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    if not os.path.exists(args.report):
        raise FileNotFoundError(args.report)
    with open(args.report, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    report = report_from_dict(payload)
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.format} report to {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctpatch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full experiment grid from a JSON config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--jobs", type=int, default=None, help="worker threads for grid cells")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("patches", help="cut labeled patches from an image + mask")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--size", type=int, default=32, choices=(16, 32, 48, 64))
    p.add_argument("--purity", type=float, default=0.9)
    p.add_argument("--source-id", default=None)
    p.add_argument("--out", required=True, help="output directory for patches + manifest")
    p.set_defaults(func=cmd_patches)

    p = sub.add_parser("features", help="extract features for every manifest patch")
    p.add_argument("--manifest", required=True)
    p.add_argument("--extractor", required=True, choices=EXTRACTORS)
    p.add_argument("--out", required=True, help="output CSV path")
    _add_feature_flags(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("cv", help="cross-validate an SVM on a feature CSV")
    p.add_argument("--features", required=True, help="feature CSV path")
    p.add_argument("--k", type=int, required=True, choices=(2, 5, 10))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--kernel", default="linear", choices=("linear", "rbf"))
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-passes", type=int, default=10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("classify", help="label every tile of an image with an ensemble")
    p.add_argument("--image", required=True)
    p.add_argument("--ensemble", required=True, help="ensemble JSON path")
    p.add_argument("--extractor", required=True, choices=EXTRACTORS)
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--out", required=True, help="output directory for overlay files")
    _add_feature_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", help="render a report JSON as markdown or CSV")
    p.add_argument("--report", required=True, help="report JSON path")
    p.add_argument("--format", default="markdown", choices=("markdown", "csv"))
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ExperimentCellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, ConfigError):
            return EXIT_CONFIG
        if isinstance(exc.cause, NumericError):
            return EXIT_NUMERIC
        return EXIT_DATA
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, FileNotFoundError, OSError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
