"""Classification metrics and the cross-validation harness.

Model quality is summarized by the Matthews correlation coefficient,
which stays informative under class imbalance. Penalty selection runs
k-fold cross-validation with independent replications and picks the
lambda maximizing the replication-mean MCC, preferring the smallest
lambda on ties.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed

from . import _serialize
from .model import classify, predict_mu
from .solver import FitConfig, FittedModel, fit

__all__ = [
    "ConfusionMatrix",
    "CvReport",
    "mcc",
    "confusion",
    "evaluate",
    "kfold_split",
    "cross_validate",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation coefficient in [-1, 1].

    (tp tn - fp fn) / sqrt((tp+fp)(tp+fn)(tn+fp)(tn+fn)), with the
    factors accumulated as floats before multiplying so large counts
    cannot overflow. Any zero factor makes the ratio 0/0; the standard
    convention 0 is returned.
    """
    tp, fp, tn, fn = float(cm.tp), float(cm.fp), float(cm.tn), float(cm.fn)
    factors = (tp + fp, tp + fn, tn + fp, tn + fn)
    if any(f == 0.0 for f in factors):
        return 0.0
    denom = math.sqrt(factors[0] * factors[1] * factors[2] * factors[3])
    return (tp * tn - fp * fn) / denom


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Count prediction outcomes; label 1 is the positive class."""
    y_true = np.asarray(y_true).astype(np.int64)
    y_pred = np.asarray(y_pred).astype(np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError(
            f"label shapes differ: {y_true.shape} vs {y_pred.shape}"
        )
    return ConfusionMatrix(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
    )


def evaluate(model: FittedModel, features, y):
    """Confusion counts, MCC, and accuracy of a model on labeled features."""
    y = np.asarray(y)
    mu = np.atleast_1d(predict_mu(model, features))
    if mu.shape[0] != y.shape[0]:
        raise ValueError(
            f"{mu.shape[0]} predictions vs {y.shape[0]} labels"
        )
    cm = confusion(y, classify(mu))
    accuracy = (cm.tp + cm.tn) / cm.total
    return cm, mcc(cm), accuracy


def kfold_split(n: int, k: int, seed: int):
    """Partition 0..n-1 into k seeded folds with sizes differing by <= 1."""
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, k)


@dataclass(frozen=True, eq=False)
class CvReport:
    """Cross-validation results over a penalty grid.

    metric has shape (len(grid), reps, folds) with NaN marking cells
    skipped because the training split contained a single class.
    replication_means averages over folds; means averages those over
    replications; selected_lambda maximizes means with ties going to
    the smallest lambda.
    """

    lambda_grid: np.ndarray
    metric: np.ndarray
    replication_means: np.ndarray
    means: np.ndarray
    selected_lambda: float
    seed: int

    def to_document(self) -> dict:
        def cell(v):
            return None if math.isnan(v) else float(v)

        return {
            "grid": [float(v) for v in self.lambda_grid],
            "metrics": [
                [[cell(v) for v in fold_vals] for fold_vals in rep_vals]
                for rep_vals in self.metric
            ],
            "replication_means": [
                [cell(v) for v in row] for row in self.replication_means
            ],
            "means": [cell(v) for v in self.means],
            "selected_lambda": float(self.selected_lambda),
            "seed": int(self.seed),
        }

    def to_json(self) -> str:
        return _serialize.render_json(self.to_document())

    def to_csv(self) -> str:
        """Flat per-cell table: lambda,rep,fold,mcc (blank mcc = missing)."""
        lines = ["lambda,rep,fold,mcc"]
        n_lam, n_rep, n_fold = self.metric.shape
        for l in range(n_lam):
            lam_txt = _serialize.fmt_float(self.lambda_grid[l])
            for r in range(n_rep):
                for f in range(n_fold):
                    v = self.metric[l, r, f]
                    v_txt = "" if math.isnan(v) else _serialize.fmt_float(v)
                    lines.append(f"{lam_txt},{r},{f},{v_txt}")
        return "\n".join(lines) + "\n"


def _cv_rep_fold(X, y, cfg_base, lambda_grid, train_idx, test_idx):
    """MCC across the lambda grid for one (replication, fold) split."""
    X_train, y_train = X[train_idx], y[train_idx]
    X_test, y_test = X[test_idx], y[test_idx]
    out = np.full(len(lambda_grid), np.nan)
    if y_train.min() == y_train.max():
        return out
    for l, lam in enumerate(lambda_grid):
        model = fit(X_train, y_train, replace(cfg_base, lam=float(lam)))
        _, score, _ = evaluate(model, X_test[:, 1:], y_test)
        out[l] = score
    return out


def cross_validate(X, y, cfg_base: FitConfig, lambda_grid, k: int,
                   reps: int, seed: int, n_jobs: int = 1) -> CvReport:
    """k-fold cross-validation over a lambda grid with replications.

    X is a design matrix (leading intercept column). Replication r uses
    folds seeded with seed + r, so the whole report is a deterministic
    function of the inputs regardless of n_jobs. Cells whose training
    split has a single class are recorded as NaN and excluded from the
    means.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    grid = np.sort(np.asarray(lambda_grid, dtype=np.float64))
    if grid.size == 0:
        raise ValueError("lambda grid is empty")
    if y.min() == y.max():
        raise ValueError("labels contain a single class")
    n = X.shape[0]
    splits = []
    for r in range(reps):
        folds = kfold_split(n, k, seed + r)
        for fold in folds:
            mask = np.ones(n, dtype=bool)
            mask[fold] = False
            splits.append((np.flatnonzero(mask), fold))
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_cv_rep_fold)(X, y, cfg_base, grid, tr, te)
        for tr, te in splits
    )
    metric = np.empty((grid.size, reps, k))
    for idx, row in enumerate(rows):
        r, f = divmod(idx, k)
        metric[:, r, f] = row
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        replication_means = np.nanmean(metric, axis=2)
        means = np.nanmean(replication_means, axis=1)
    if np.all(np.isnan(means)):
        raise ValueError("every cross-validation cell was skipped")
    selected = float(grid[np.nanargmax(means)])
    return CvReport(
        lambda_grid=grid,
        metric=metric,
        replication_means=replication_means,
        means=means,
        selected_lambda=selected,
        seed=int(seed),
    )
