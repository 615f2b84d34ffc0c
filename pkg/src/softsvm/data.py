"""Dataset ingestion, standardization, simulation, and the factorial study.

The simulator draws a two-class Gaussian mixture in the plane whose
ideal decision boundary is the line x2 = x1 + 1: class 0 centers at
(sqrt(2), 1) and class 1 at (0, 1 + sqrt(2)), both at distance 1 from
the boundary, with isotropic per-coordinate standard deviation sigma.
The factorial runner sweeps imbalance rho and noise sigma, comparing
the full fit (with cross-validated penalty) against plain logistic
regression on independently drawn held-out data.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from . import _serialize
from .evaluation import cross_validate, evaluate
from .solver import FitConfig, fit

__all__ = [
    "DataError",
    "Dataset",
    "Standardization",
    "SimSpec",
    "BenchRow",
    "load_csv",
    "load_features",
    "standardize",
    "design_matrix",
    "simulate_mixture",
    "run_factorial",
    "dataset_csv",
    "bench_csv",
    "DEFAULT_BENCH_GRID",
]

#: Penalty grid used by run_factorial's internal lambda selection.
DEFAULT_BENCH_GRID = tuple(float(v) for v in np.geomspace(1e-3, 1e3, 7))


class DataError(Exception):
    """Malformed or unusable input data (maps to CLI exit code 2)."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labeled observations: an n x f feature matrix and binary labels."""

    feature_names: tuple
    features: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True, eq=False)
class Standardization:
    """Per-feature centering/scaling transform recorded at fit time."""

    means: np.ndarray
    scales: np.ndarray
    constant_mask: np.ndarray


@dataclass(frozen=True)
class SimSpec:
    """Mixture draw: n points, imbalance rho in (0, 0.5], noise sigma > 0."""

    n: int
    rho: float
    sigma: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.rho <= 0.5:
            raise ValueError(f"rho must lie in (0, 0.5], got {self.rho}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.n1 < 1:
            raise ValueError(f"floor(rho*n) must be >= 1, got n={self.n}, rho={self.rho}")

    @property
    def n1(self) -> int:
        return int(math.floor(self.rho * self.n))

    @property
    def n2(self) -> int:
        return self.n - self.n1


def _read_rows(path):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if row]
    if not rows:
        raise DataError(f"{path}: empty file")
    return rows


def _parse_cell(text, path, row_num, col_name):
    try:
        return float(text)
    except ValueError:
        raise DataError(
            f"{path}: row {row_num}: non-numeric value {text!r} in column {col_name!r}"
        ) from None


def load_csv(path, label_column: str, positive_label: str | None = None,
             threshold: float | None = None) -> Dataset:
    """Read a headered CSV into a Dataset, dichotomizing the label column.

    Exactly one labeling rule may be given: positive_label maps cells
    exactly equal to that string to 1 (everything else to 0); threshold
    parses the label as a number and maps values >= threshold to 1.
    With neither rule the label column must already be numeric 0/1.
    Feature columns must parse as numbers; failures carry the 1-based
    data row number.
    """
    if positive_label is not None and threshold is not None:
        raise ValueError("give at most one of positive_label and threshold")
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if label_column not in header:
        raise DataError(f"{path}: no column named {label_column!r}")
    label_idx = header.index(label_column)
    feature_names = tuple(h for i, h in enumerate(header) if i != label_idx)
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no data rows")
    features = np.empty((len(body), len(feature_names)))
    labels = np.empty(len(body), dtype=np.int64)
    for r, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(
                f"{path}: row {r}: expected {len(header)} cells, got {len(row)}"
            )
        j = 0
        for i, cell in enumerate(row):
            if i == label_idx:
                continue
            features[r - 1, j] = _parse_cell(cell.strip(), path, r, header[i])
            j += 1
        raw = row[label_idx].strip()
        if positive_label is not None:
            labels[r - 1] = 1 if raw == positive_label else 0
        elif threshold is not None:
            value = _parse_cell(raw, path, r, label_column)
            labels[r - 1] = 1 if value >= threshold else 0
        else:
            value = _parse_cell(raw, path, r, label_column)
            if value not in (0.0, 1.0):
                raise DataError(
                    f"{path}: row {r}: label {raw!r} is not 0/1 and no "
                    "dichotomization rule was given"
                )
            labels[r - 1] = int(value)
    return Dataset(feature_names=feature_names, features=features, labels=labels)


def load_features(path):
    """Read a headered all-numeric CSV as (column_names, matrix)."""
    rows = _read_rows(path)
    header = tuple(h.strip() for h in rows[0])
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no data rows")
    out = np.empty((len(body), len(header)))
    for r, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(
                f"{path}: row {r}: expected {len(header)} cells, got {len(row)}"
            )
        for i, cell in enumerate(row):
            out[r - 1, i] = _parse_cell(cell.strip(), path, r, header[i])
    return header, out


def standardize(dataset: Dataset):
    """Center each feature and scale to unit sample standard deviation.

    Constant columns get scale 1 (left centered at zero) and are
    flagged. Returns the transformed Dataset and the Standardization.
    """
    x = dataset.features
    if x.shape[0] < 2:
        raise DataError("standardization needs at least two rows")
    means = x.mean(axis=0)
    scales = x.std(axis=0, ddof=1)
    constant = scales == 0.0
    scales = np.where(constant, 1.0, scales)
    transformed = (x - means) / scales
    return (
        Dataset(
            feature_names=dataset.feature_names,
            features=transformed,
            labels=dataset.labels,
        ),
        Standardization(means=means, scales=scales, constant_mask=constant),
    )


def design_matrix(d) -> np.ndarray:
    """Prepend an intercept column of ones to the feature matrix."""
    features = d.features if isinstance(d, Dataset) else np.asarray(d, dtype=np.float64)
    if features.ndim != 2:
        raise ValueError("features must be a 2-d matrix")
    return np.hstack([np.ones((features.shape[0], 1)), features])


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

#: Class-conditional means: both at Euclidean distance 1 from x2 = x1 + 1.
CLASS0_MEAN = (math.sqrt(2.0), 1.0)
CLASS1_MEAN = (0.0, 1.0 + math.sqrt(2.0))


def simulate_mixture(spec: SimSpec) -> Dataset:
    """Draw the two-class planar Gaussian mixture for a SimSpec.

    floor(rho*n) label-0 rows from N(CLASS0_MEAN, sigma^2 I) followed by
    the remaining label-1 rows from N(CLASS1_MEAN, sigma^2 I), generated
    by numpy's seeded PCG64 generator (ziggurat normals), so a spec maps
    to exactly one dataset.
    """
    rng = np.random.default_rng(spec.seed)
    x0 = rng.normal(loc=CLASS0_MEAN, scale=spec.sigma, size=(spec.n1, 2))
    x1 = rng.normal(loc=CLASS1_MEAN, scale=spec.sigma, size=(spec.n2, 2))
    return Dataset(
        feature_names=("x1", "x2"),
        features=np.vstack([x0, x1]),
        labels=np.concatenate([
            np.zeros(spec.n1, dtype=np.int64),
            np.ones(spec.n2, dtype=np.int64),
        ]),
    )


def dataset_csv(dataset: Dataset) -> str:
    """Render a dataset as CSV with the label in a trailing y column."""
    lines = [",".join(list(dataset.feature_names) + ["y"])]
    for row, label in zip(dataset.features, dataset.labels):
        cells = [_serialize.fmt_float(v) for v in row]
        cells.append(str(int(label)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Factorial study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    """One method's held-out result in one factorial cell."""

    rho: float
    sigma: float
    rep: int
    method: str
    mcc: float
    converged: bool
    coef_norm: float


def _cell_seed(base_seed: int, i: int, j: int, rep: int, salt: int) -> int:
    seq = np.random.SeedSequence((base_seed, i, j, rep, salt))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _bench_cell(i, j, rep, rho, sigma, n, base_seed, cv_folds, cv_reps,
                lambda_grid):
    """Fit both methods on one simulated cell; returns two BenchRows."""
    train = simulate_mixture(SimSpec(
        n=n, rho=rho, sigma=sigma, seed=_cell_seed(base_seed, i, j, rep, 0)
    ))
    test = simulate_mixture(SimSpec(
        n=n, rho=rho, sigma=sigma, seed=_cell_seed(base_seed, i, j, rep, 1)
    ))
    X = design_matrix(train)
    rows = []

    report = cross_validate(
        X, train.labels, FitConfig(), lambda_grid, cv_folds, cv_reps,
        seed=_cell_seed(base_seed, i, j, rep, 2),
    )
    soft = fit(X, train.labels, FitConfig(lam=report.selected_lambda))
    _, soft_mcc, _ = evaluate(soft, test.features, test.labels)
    rows.append(BenchRow(
        rho=rho, sigma=sigma, rep=rep, method="softsvm", mcc=soft_mcc,
        converged=soft.converged, coef_norm=float(np.linalg.norm(soft.beta)),
    ))

    logistic = fit(X, train.labels, FitConfig(lam=0.0, fix_kappa=1.0, fix_alpha=0.0))
    _, log_mcc, _ = evaluate(logistic, test.features, test.labels)
    rows.append(BenchRow(
        rho=rho, sigma=sigma, rep=rep, method="logistic", mcc=log_mcc,
        converged=logistic.converged,
        coef_norm=float(np.linalg.norm(logistic.beta)),
    ))
    return rows


def run_factorial(rhos, sigmas, n: int, reps: int, base_seed: int,
                  cv_folds: int = 10, cv_reps: int = 1,
                  lambda_grid=DEFAULT_BENCH_GRID, n_jobs: int = 1):
    """Sweep (rho, sigma, replication) cells; two BenchRows per cell.

    Each cell simulates an independent training and test draw, selects
    the penalty for the full fit by cross-validation on the training
    draw, and scores held-out MCC on the test draw; the logistic
    baseline (kappa=1, alpha=0, lambda=0) is fit on the same draws.
    Per-cell seeds are derived from (base_seed, rho index, sigma index,
    rep) up front, so results are deterministic for any n_jobs.
    """
    rhos = [float(r) for r in rhos]
    sigmas = [float(s) for s in sigmas]
    if not rhos or not sigmas or reps < 1:
        raise ValueError("factorial grids must be nonempty and reps >= 1")
    cells = [
        (i, j, rep, rho, sigma)
        for i, rho in enumerate(rhos)
        for j, sigma in enumerate(sigmas)
        for rep in range(reps)
    ]
    per_cell = Parallel(n_jobs=n_jobs)(
        delayed(_bench_cell)(i, j, rep, rho, sigma, n, base_seed,
                             cv_folds, cv_reps, lambda_grid)
        for i, j, rep, rho, sigma in cells
    )
    return [row for rows in per_cell for row in rows]


def bench_csv(rows) -> str:
    """Flat results table: rho,sigma,rep,method,mcc,converged,coef_norm."""
    lines = ["rho,sigma,rep,method,mcc,converged,coef_norm"]
    for r in rows:
        mcc_txt = "" if math.isnan(r.mcc) else _serialize.fmt_float(r.mcc)
        norm_txt = "" if math.isnan(r.coef_norm) else _serialize.fmt_float(r.coef_norm)
        lines.append(",".join([
            _serialize.fmt_float(r.rho),
            _serialize.fmt_float(r.sigma),
            str(int(r.rep)),
            r.method,
            mcc_txt,
            "true" if r.converged else "false",
            norm_txt,
        ]))
    return "\n".join(lines) + "\n"
