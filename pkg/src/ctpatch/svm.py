"""Soft-margin binary SVM trained with a simplified SMO solver.

The trainer sweeps all points, picks a KKT violator as the first index and a
uniformly random second index, and solves the two-variable subproblem in
closed form.  Training stops after `max_passes` consecutive sweeps without an
update (or at the `max_sweeps` safety cap).  Starting from alpha = 0, every
pairwise update preserves sum(alpha_i * y_i) = 0 exactly.

Labels are +1 = "coronavirus", -1 = "non-coronavirus" throughout; a decision
value of exactly 0 maps to the positive class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CorruptFileError,
    DimensionMismatchError,
    EmptyEnsembleError,
    ModelMismatchError,
    NonFiniteFeatureError,
    SingleClassInputError,
    TooFewRowsError,
)
from .imaging import CORONAVIRUS, NON_CORONAVIRUS

KERNELS = ("linear", "rbf")
LABEL_MAP = {1: CORONAVIRUS, -1: NON_CORONAVIRUS}


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-feature z-score transform; zero stds are stored as 1."""

    means: np.ndarray
    stds: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.means) / self.stds

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(means=np.zeros(dim), stds=np.ones(dim))


def fit_standardizer(x: np.ndarray) -> Standardizer:
    """Column means and population stds (divide by n) of a feature matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise TooFewRowsError(f"need a 2-D matrix with >= 2 rows, got shape {x.shape}")
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds = np.where(stds == 0.0, 1.0, stds)
    return Standardizer(means=means, stds=stds)


@dataclass(frozen=True)
class SvmParams:
    kernel: str = "linear"
    C: float = 1.0
    gamma: float | None = None  # rbf only; defaults to 1 / n_features at fit time
    tol: float = 1e-3
    max_passes: int = 10
    seed: int = 0
    max_sweeps: int = 1000  # safety cap, unreachable on healthy data


@dataclass(frozen=True, eq=False)
class SvmModel:
    kernel: str
    gamma: float | None
    C: float
    support_vectors: np.ndarray  # (n_sv, dim), standardized space
    dual_coefs: np.ndarray  # alpha_i * y_i, signed
    bias: float
    standardizer: Standardizer
    seed: int
    label_map: dict[int, str] = field(default_factory=lambda: dict(LABEL_MAP))

    @property
    def dim(self) -> int:
        return int(self.standardizer.means.size)


@dataclass(frozen=True)
class Prediction:
    label: str
    decision_value: float


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """One trained model per training fold, voting jointly at prediction time."""

    members: tuple[SvmModel, ...]

    def __post_init__(self):
        if not self.members:
            raise EmptyEnsembleError("ensemble needs at least one member")
        kernels = {m.kernel for m in self.members}
        dims = {m.dim for m in self.members}
        if len(kernels) > 1 or len(dims) > 1:
            raise ModelMismatchError(
                f"ensemble members disagree: kernels {sorted(kernels)}, dims {sorted(dims)}"
            )
        object.__setattr__(self, "members", tuple(self.members))

    @property
    def dim(self) -> int:
        return self.members[0].dim


def _kernel_matrix(kernel: str, gamma: float | None, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """K[i, j] = k(a_i, b_j)."""
    if kernel == "linear":
        return a @ b.T
    if kernel == "rbf":
        sq = (a**2).sum(axis=1)[:, None] + (b**2).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"kernel must be one of {KERNELS}, got {kernel!r}")


def train_svm(
    x: np.ndarray,
    y: np.ndarray,
    params: SvmParams = SvmParams(),
    standardizer: Standardizer | None = None,
) -> SvmModel:
    """Solve the soft-margin dual by simplified SMO on standardized rows.

    `x` is expected to be standardized already; pass the fitted standardizer
    so the model can transform raw inputs at prediction time.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"x {x.shape} does not pair with y {y.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteFeatureError("training matrix holds non-finite values")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1/-1")
    if len(np.unique(y)) < 2:
        raise SingleClassInputError("training data holds a single class")

    m, dim = x.shape
    c = float(params.C)
    tol = float(params.tol)
    gamma = params.gamma
    if params.kernel == "rbf" and gamma is None:
        gamma = 1.0 / dim

    k = _kernel_matrix(params.kernel, gamma, x, x)
    alpha = np.zeros(m)
    bias = 0.0
    fx = np.zeros(m)  # cached K @ (alpha * y)
    rng = np.random.default_rng(params.seed)

    def try_pair(i: int, j: int) -> bool:
        nonlocal bias, fx
        err_i = fx[i] + bias - y[i]
        err_j = fx[j] + bias - y[j]
        ai_old, aj_old = alpha[i], alpha[j]
        if y[i] != y[j]:
            low, high = max(0.0, aj_old - ai_old), min(c, c + aj_old - ai_old)
        else:
            low, high = max(0.0, ai_old + aj_old - c), min(c, ai_old + aj_old)
        if low >= high:
            return False
        eta = 2.0 * k[i, j] - k[i, i] - k[j, j]
        if eta >= 0.0:
            return False
        aj_new = aj_old - y[j] * (err_i - err_j) / eta
        aj_new = min(high, max(low, aj_new))
        if abs(aj_new - aj_old) < 1e-5:
            return False
        delta_j = aj_new - aj_old
        ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new)
        b1 = bias - err_i - y[i] * (ai_new - ai_old) * k[i, i] - y[j] * delta_j * k[i, j]
        b2 = bias - err_j - y[i] * (ai_new - ai_old) * k[i, j] - y[j] * delta_j * k[j, j]
        alpha[i], alpha[j] = ai_new, aj_new
        fx += y[i] * (ai_new - ai_old) * k[:, i] + y[j] * delta_j * k[:, j]
        if 0.0 < ai_new < c:
            bias = b1
        elif 0.0 < aj_new < c:
            bias = b2
        else:
            bias = (b1 + b2) / 2.0
        return True

    # stalled[i]: a full partner sweep failed for i and no update has happened
    # since, so retrying i against the unchanged state cannot succeed.
    stalled = np.zeros(m, dtype=bool)
    quiet_passes = 0
    sweeps = 0
    while quiet_passes < params.max_passes and sweeps < params.max_sweeps:
        changed = 0
        for i in range(m):
            if stalled[i]:
                continue
            err_i = fx[i] + bias - y[i]
            if not (
                (y[i] * err_i < -tol and alpha[i] < c)
                or (y[i] * err_i > tol and alpha[i] > 0.0)
            ):
                continue
            # Random partner first; if that pair cannot move, sweep the rest
            # from a random offset so a workable partner is never missed.
            j = int(rng.integers(m - 1))
            if j >= i:
                j += 1
            if try_pair(i, j):
                changed += 1
                stalled[:] = False
                continue
            moved = False
            start = int(rng.integers(m))
            for step in range(m):
                j = (start + step) % m
                if j == i:
                    continue
                if try_pair(i, j):
                    moved = True
                    break
            if moved:
                changed += 1
                stalled[:] = False
            else:
                stalled[i] = True
        sweeps += 1
        quiet_passes = quiet_passes + 1 if changed == 0 else 0

    # Keep every strictly positive alpha so sum(dual_coefs) stays exactly 0.
    sv = alpha > 0.0
    return SvmModel(
        kernel=params.kernel,
        gamma=gamma,
        C=c,
        support_vectors=x[sv].copy(),
        dual_coefs=(alpha * y)[sv],
        bias=float(bias),
        standardizer=standardizer if standardizer is not None else Standardizer.identity(dim),
        seed=params.seed,
    )


def decision_values(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Decision function for a (n, dim) matrix of raw (unstandardized) rows."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.dim:
        raise DimensionMismatchError(f"input dim {x.shape[1]} != model dim {model.dim}")
    z = model.standardizer.transform(x)
    if model.support_vectors.shape[0] == 0:
        return np.full(z.shape[0], model.bias)
    k = _kernel_matrix(model.kernel, model.gamma, model.support_vectors, z)
    return model.dual_coefs @ k + model.bias


def predict(model: SvmModel, x: np.ndarray) -> Prediction:
    """Label a single raw feature vector; decision value 0 maps to +1."""
    value = float(decision_values(model, np.asarray(x, dtype=np.float64).reshape(1, -1))[0])
    sign = 1 if value >= 0.0 else -1
    return Prediction(label=model.label_map[sign], decision_value=value)


def ensemble_vote(ensemble: EnsembleModel, x: np.ndarray) -> tuple[str, float]:
    """Majority label and the mean decision value across members."""
    values = [float(decision_values(member, x.reshape(1, -1))[0]) for member in ensemble.members]
    positive = sum(1 for v in values if v >= 0.0)
    negative = len(values) - positive
    mean_value = float(np.mean(values))
    if positive > negative:
        label = CORONAVIRUS
    elif negative > positive:
        label = NON_CORONAVIRUS
    else:
        label = CORONAVIRUS if mean_value >= 0.0 else NON_CORONAVIRUS
    return label, mean_value


def ensemble_predict(ensemble: EnsembleModel, x: np.ndarray) -> str:
    """Majority vote; ties fall back to the sign of the mean decision value."""
    return ensemble_vote(ensemble, np.asarray(x, dtype=np.float64))[0]


# --- persistence -------------------------------------------------------------

def model_to_dict(model: SvmModel) -> dict:
    payload = {
        "kernel": model.kernel,
        "C": model.C,
        "support_vectors": model.support_vectors.tolist(),
        "dual_coefs": model.dual_coefs.tolist(),
        "bias": model.bias,
        "means": model.standardizer.means.tolist(),
        "stds": model.standardizer.stds.tolist(),
        "label_map": {f"{k:+d}": v for k, v in model.label_map.items()},
        "seed": model.seed,
    }
    if model.gamma is not None:
        payload["gamma"] = model.gamma
    return payload


def model_from_dict(payload: dict) -> SvmModel:
    try:
        dim = len(payload["means"])
        return SvmModel(
            kernel=payload["kernel"],
            gamma=payload.get("gamma"),
            C=float(payload["C"]),
            support_vectors=np.asarray(payload["support_vectors"], dtype=np.float64).reshape(
                -1, dim
            ),
            dual_coefs=np.asarray(payload["dual_coefs"], dtype=np.float64),
            bias=float(payload["bias"]),
            standardizer=Standardizer(
                means=np.asarray(payload["means"], dtype=np.float64),
                stds=np.asarray(payload["stds"], dtype=np.float64),
            ),
            seed=int(payload["seed"]),
            label_map={int(k): v for k, v in payload["label_map"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"malformed model payload: {exc}") from exc


def save_ensemble(ensemble: EnsembleModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([model_to_dict(m) for m in ensemble.members], fh)
        fh.write("\n")


def load_ensemble(path: str) -> EnsembleModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, list):
        raise CorruptFileError(f"{path}: ensemble file must hold a JSON array of models")
    return EnsembleModel(members=tuple(model_from_dict(item) for item in payload))
