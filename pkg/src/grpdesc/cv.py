"""K-fold cross-validation along a shared lambda grid."""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .logistic import _check_binary
from .path import FitPath, fit_path
from .penalties import Loss, PenaltySpec


class Metric(str, enum.Enum):
    RMSE = "rmse"
    MISCLASSIFICATION = "misclass"
    DEVIANCE = "deviance"


@dataclass(frozen=True)
class CVResult:
    lambdas: np.ndarray
    cve: np.ndarray
    cvse: np.ndarray
    lambda_min_index: int
    fold_assignment: np.ndarray
    metric: Metric
    fold_errors: np.ndarray
    fit: FitPath

    @property
    def lambda_min(self):
        return float(self.lambdas[self.lambda_min_index])


def assign_folds(y, k, seed, stratify=False):
    """Random fold ids 0..k-1 with fold sizes differing by at most one.

    With ``stratify`` each class is dealt round-robin in turn, so class counts
    per fold also differ by at most one.
    """
    n = len(y)
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=np.int64)
    if not stratify:
        folds[rng.permutation(n)] = np.arange(n) % k
        return folds
    offset = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        folds[idx[rng.permutation(len(idx))]] = (np.arange(len(idx)) + offset) % k
        offset += len(idx)
    return folds


def fold_error(y, mean, metric):
    """Error of fitted means on held-out rows; one value per column of ``mean``."""
    y = y[:, None]
    if metric is Metric.RMSE:
        return np.sqrt(np.mean((y - mean) ** 2, axis=0))
    if metric is Metric.MISCLASSIFICATION:
        return np.mean((mean > 0.5) != (y == 1), axis=0)
    pi = np.clip(mean, 1e-10, 1 - 1e-10)
    return np.mean(-2 * (y * np.log(pi) + (1 - y) * np.log1p(-pi)), axis=0)


def cross_validate(design, spec=None, k=5, seed=0, metric=None, n_lambda=100, min_ratio=None,
                   folds=None, threads=1, **controls):
    """Cross-validate the path; ``controls`` pass through to :func:`fit_path`.

    Every fold is fit at exactly the full-data grid. Folds whose path stops
    early at saturation are scored on their prefix only, and lambdas not scored
    by every fold are dropped.
    """
    spec = PenaltySpec() if spec is None else spec
    logistic = spec.loss is Loss.LOGISTIC
    if metric is None:
        metric = Metric.DEVIANCE if logistic else Metric.RMSE
    metric = Metric(metric)
    if logistic:
        _check_binary(design.y)
    elif metric is not Metric.RMSE:
        raise ValueError(f"metric '{metric.value}' needs logistic loss")

    full = fit_path(design, spec, n_lambda=n_lambda, min_ratio=min_ratio, **controls)
    if folds is None:
        folds = assign_folds(design.y, k, seed, stratify=logistic)
    else:
        folds = np.asarray(folds, dtype=np.int64)
        k = int(folds.max()) + 1
    if folds.shape != (design.n,) or set(np.unique(folds)) != set(range(k)):
        raise ValueError("fold assignment must label every row with 0..k-1")

    if logistic:
        for f in range(k):
            train = design.y[folds != f]
            if train.min() == train.max():
                raise ValueError(f"training data for fold {f} has a single class")

    grid = full.lambdas

    def run(f):
        train = design.subset(folds != f)
        test = folds == f
        path = fit_path(train, spec, lambdas=grid, **controls)
        return fold_error(design.y[test], path.predict(design.X[test]).reshape(test.sum(), -1), metric)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errs = list(pool.map(run, range(k)))
    else:
        errs = [run(f) for f in range(k)]

    L = min(len(e) for e in errs)
    if L == 0:
        raise ValueError("no lambda value was scored by every fold")
    E = np.vstack([e[:L] for e in errs])
    cve = E.mean(axis=0)
    cvse = E.std(axis=0, ddof=1) / np.sqrt(k)
    return CVResult(
        lambdas=grid[:L],
        cve=cve,
        cvse=cvse,
        lambda_min_index=int(np.argmin(cve)),
        fold_assignment=folds,
        metric=metric,
        fold_errors=E,
        fit=full,
    )
