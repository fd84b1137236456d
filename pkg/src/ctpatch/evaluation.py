"""Stratified k-fold cross-validation and confusion-matrix metrics.

"coronavirus" is the positive class everywhere.  Folds come from a seeded
per-class shuffle dealt round-robin, which bounds the per-fold class-count
deviation at one sample per class.  Fold metrics aggregate as mean and
population standard deviation across folds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ClassTooSmallError,
    ConfigError,
    DataError,
    EmptyCountsError,
    LengthMismatchError,
)
from .imaging import CORONAVIRUS, LABELS, NON_CORONAVIRUS
from .svm import EnsembleModel, SvmParams, decision_values, fit_standardizer, train_svm

METRIC_NAMES = ("sensitivity", "specificity", "accuracy", "precision", "f_score")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricSet:
    sensitivity: float
    specificity: float
    accuracy: float
    precision: float
    f_score: float
    degenerate: tuple[str, ...] = ()  # metrics whose denominator was 0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.sensitivity, self.specificity, self.accuracy, self.precision, self.f_score]
        )


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignments: np.ndarray  # sample index -> fold id
    seed: int

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


@dataclass(frozen=True)
class CvSummary:
    per_fold: tuple[MetricSet, ...]
    mean: MetricSet
    std: MetricSet


def make_folds(labels, k: int, seed: int) -> FoldPlan:
    """Stratified shuffled fold assignment, deterministic per seed."""
    labels = list(labels)
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ConfigError(f"k must be an integer >= 2, got {k!r}")
    classes = sorted(set(labels))
    counts = {cls: labels.count(cls) for cls in classes}
    for cls, count in counts.items():
        if count < k:
            raise ClassTooSmallError(f"class {cls!r} has {count} samples, needs >= {k}")

    rng = np.random.default_rng(seed)
    assignments = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for cls in classes:
        idx = np.array([i for i, lab in enumerate(labels) if lab == cls])
        rng.shuffle(idx)
        for t, sample in enumerate(idx):
            assignments[sample] = (offset + t) % k
        offset = (offset + len(idx)) % k
    return FoldPlan(k=int(k), assignments=assignments, seed=int(seed))


def confusion(y_true, y_pred) -> ConfusionCounts:
    """Count tp/tn/fp/fn with "coronavirus" positive."""
    y_true, y_pred = list(y_true), list(y_pred)
    if len(y_true) != len(y_pred):
        raise LengthMismatchError(f"y_true has {len(y_true)} entries, y_pred {len(y_pred)}")
    tp = tn = fp = fn = 0
    for truth, pred in zip(y_true, y_pred):
        if truth == CORONAVIRUS:
            if pred == CORONAVIRUS:
                tp += 1
            else:
                fn += 1
        else:
            if pred == CORONAVIRUS:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def metrics(c: ConfusionCounts) -> MetricSet:
    """Sensitivity, specificity, accuracy, precision, F-score from raw counts.

    A metric whose denominator is 0 is defined as 0 and listed in
    `degenerate`.
    """
    if c.total == 0:
        raise EmptyCountsError("metrics need at least one evaluated sample")
    flags: list[str] = []

    def rate(num: int, den: int, name: str) -> float:
        if den == 0:
            flags.append(name)
            return 0.0
        return num / den

    sensitivity = rate(c.tp, c.tp + c.fn, "sensitivity")
    specificity = rate(c.tn, c.tn + c.fp, "specificity")
    accuracy = rate(c.tp + c.tn, c.total, "accuracy")
    precision = rate(c.tp, c.tp + c.fp, "precision")
    f_score = rate(2 * c.tp, 2 * c.tp + c.fp + c.fn, "f_score")
    return MetricSet(
        sensitivity=sensitivity,
        specificity=specificity,
        accuracy=accuracy,
        precision=precision,
        f_score=f_score,
        degenerate=tuple(flags),
    )


def summarize(per_fold) -> CvSummary:
    """Element-wise mean and population std across fold metrics."""
    per_fold = tuple(per_fold)
    if not per_fold:
        raise EmptyCountsError("no fold metrics to summarize")
    stacked = np.stack([m.as_array() for m in per_fold])
    means = stacked.mean(axis=0)
    stds = stacked.std(axis=0)
    flags = tuple(sorted({name for m in per_fold for name in m.degenerate}))
    mean = MetricSet(*(float(v) for v in means), degenerate=flags)
    std = MetricSet(*(float(v) for v in stds))
    return CvSummary(per_fold=per_fold, mean=mean, std=std)


def cross_validate(
    features: np.ndarray,
    labels,
    k: int,
    svm_params: SvmParams = SvmParams(),
    seed: int = 0,
) -> tuple[CvSummary, EnsembleModel]:
    """Per-fold standardize/train/evaluate; returns fold metrics + fold models.

    The standardizer is fit on training rows only and travels inside each
    fold's model, so held-out rows never influence training.
    """
    x = np.asarray(features, dtype=np.float64)
    labels = list(labels)
    if x.ndim != 2 or x.shape[0] != len(labels):
        raise LengthMismatchError(f"features {x.shape} do not pair with {len(labels)} labels")
    unknown = sorted(set(labels) - set(LABELS))
    if unknown:
        raise DataError(f"unknown labels {unknown}")

    plan = make_folds(labels, k, seed)
    y = np.where(np.array(labels) == CORONAVIRUS, 1.0, -1.0)
    labels_arr = np.array(labels)

    fold_metrics = []
    models = []
    for fold in range(plan.k):
        train_idx = plan.train_indices(fold)
        val_idx = plan.fold_indices(fold)
        standardizer = fit_standardizer(x[train_idx])
        model = train_svm(
            standardizer.transform(x[train_idx]),
            y[train_idx],
            replace(svm_params, seed=svm_params.seed + fold),
            standardizer=standardizer,
        )
        values = decision_values(model, x[val_idx])
        predicted = np.where(values >= 0.0, CORONAVIRUS, NON_CORONAVIRUS)
        fold_metrics.append(metrics(confusion(labels_arr[val_idx], predicted)))
        models.append(model)
    return summarize(fold_metrics), EnsembleModel(members=tuple(models))
