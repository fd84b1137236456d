"""Render cross-validation results as per-subset tables.

Columns: Stage | Feature Extraction | Number of Features | Cross-validation |
SEN | SPE | ACC | PRE | F-score.  Metric cells are percentages with two
decimals, mean and std joined by " ± ".  RAW rows are Stage 1 with "x" in the
Feature Extraction column; every other extractor is Stage 2.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

from .errors import CorruptFileError, EmptyReportError
from .evaluation import CvSummary, MetricSet


@dataclass(frozen=True)
class ReportRow:
    subset: str
    extractor: str
    n_features: int
    k: int
    summary: CvSummary

    @property
    def stage(self) -> str:
        return "Stage 1" if self.extractor == "RAW" else "Stage 2"

    @property
    def extraction_cell(self) -> str:
        return "x" if self.extractor == "RAW" else self.extractor


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ReportRow, ...]
    config_fingerprint: str
    seed: int
    version: str


def metric_cell(mean: float, std: float) -> str:
    """Format a (mean, std) pair of rates as percentage text, e.g. 98.91 ± 0.20."""
    return f"{mean * 100:.2f} ± {std * 100:.2f}"


def _metric_cells(summary: CvSummary) -> list[str]:
    return [
        metric_cell(m, s)
        for m, s in zip(summary.mean.as_array(), summary.std.as_array())
    ]


HEADER = (
    "Stage",
    "Feature Extraction",
    "Number of Features",
    "Cross-validation",
    "SEN",
    "SPE",
    "ACC",
    "PRE",
    "F-score",
)


def render_markdown(report: ExperimentReport) -> str:
    """One markdown table per subset, rows in report order."""
    if not report.rows:
        raise EmptyReportError("report holds no rows")
    out = io.StringIO()
    out.write("# Patch classification report\n\n")
    out.write(
        f"config: {report.config_fingerprint}  seed: {report.seed}  version: {report.version}\n"
    )
    current_subset = None
    for row in report.rows:
        if row.subset != current_subset:
            current_subset = row.subset
            out.write(f"\n## {row.subset}\n\n")
            out.write("| " + " | ".join(HEADER) + " |\n")
            out.write("|" + "---|" * len(HEADER) + "\n")
        cells = [
            row.stage,
            row.extraction_cell,
            str(row.n_features),
            f"{row.k}-fold",
        ] + _metric_cells(row.summary)
        out.write("| " + " | ".join(cells) + " |\n")
    return out.getvalue()


def render_csv(report: ExperimentReport) -> str:
    """Same rows as the markdown render, with a leading subset column."""
    if not report.rows:
        raise EmptyReportError("report holds no rows")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["subset"] + [h.lower().replace(" ", "_").replace("-", "_") for h in HEADER])
    for row in report.rows:
        writer.writerow(
            [row.subset, row.stage, row.extraction_cell, row.n_features, f"{row.k}-fold"]
            + _metric_cells(row.summary)
        )
    return out.getvalue()


def render(report: ExperimentReport, fmt: str) -> str:
    if fmt == "markdown":
        return render_markdown(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"format must be 'markdown' or 'csv', got {fmt!r}")


# --- JSON round trip ---------------------------------------------------------

def metricset_to_dict(m: MetricSet) -> dict:
    return {
        "sensitivity": m.sensitivity,
        "specificity": m.specificity,
        "accuracy": m.accuracy,
        "precision": m.precision,
        "f_score": m.f_score,
        "degenerate": list(m.degenerate),
    }


def metricset_from_dict(payload: dict) -> MetricSet:
    return MetricSet(
        sensitivity=float(payload["sensitivity"]),
        specificity=float(payload["specificity"]),
        accuracy=float(payload["accuracy"]),
        precision=float(payload["precision"]),
        f_score=float(payload["f_score"]),
        degenerate=tuple(payload.get("degenerate", ())),
    )


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "config_fingerprint": report.config_fingerprint,
        "seed": report.seed,
        "version": report.version,
        "rows": [
            {
                "subset": row.subset,
                "stage": row.stage,
                "extractor": row.extractor,
                "n_features": row.n_features,
                "k": row.k,
                "per_fold": [metricset_to_dict(m) for m in row.summary.per_fold],
                "mean": metricset_to_dict(row.summary.mean),
                "std": metricset_to_dict(row.summary.std),
            }
            for row in report.rows
        ],
    }


def report_from_dict(payload: dict) -> ExperimentReport:
    try:
        rows = tuple(
            ReportRow(
                subset=item["subset"],
                extractor=item["extractor"],
                n_features=int(item["n_features"]),
                k=int(item["k"]),
                summary=CvSummary(
                    per_fold=tuple(metricset_from_dict(m) for m in item["per_fold"]),
                    mean=metricset_from_dict(item["mean"]),
                    std=metricset_from_dict(item["std"]),
                ),
            )
            for item in payload["rows"]
        )
        return ExperimentReport(
            rows=rows,
            config_fingerprint=payload["config_fingerprint"],
            seed=int(payload["seed"]),
            version=payload["version"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"malformed report payload: {exc}") from exc
