"""Command-line surface: simulate, fit, predict, cv, curves, bench.

Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence
under --strict. Output files are computed fully before anything is
written, so a failed invocation never leaves a partial file, and every
randomized command takes --seed (default 0) so runs are reproducible
byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import _serialize
from .data import (
    DataError,
    SimSpec,
    bench_csv,
    dataset_csv,
    design_matrix,
    load_csv,
    load_features,
    run_factorial,
    simulate_mixture,
    standardize,
)
from .evaluation import cross_validate
from .family import FamilyParams
from .model import diagnose
from .solver import FitConfig, FittedModel, fit

__all__ = ["main", "UsageError", "parse_log_grid", "parse_range"]


class UsageError(Exception):
    """Bad flags or flag values (maps to CLI exit code 1)."""


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we need 1."""

    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Flag-value parsing
# ---------------------------------------------------------------------------

def parse_log_grid(text: str) -> np.ndarray:
    """Parse "lo:hi:count" into count log-spaced values, endpoints inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be 'lo:hi:count', got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if lo <= 0.0 or hi <= 0.0:
        raise UsageError("grid endpoints must be positive for log spacing")
    if hi < lo:
        raise UsageError("grid upper endpoint must be >= lower endpoint")
    if count < 1:
        raise UsageError("grid count must be >= 1")
    if count == 1:
        if lo != hi:
            raise UsageError("a 1-point grid needs equal endpoints")
        return np.array([lo])
    return np.geomspace(lo, hi, count)


def parse_range(text: str) -> np.ndarray:
    """Parse "lo:hi:step" into lo, lo+step, ... up to hi inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be 'lo:hi:step', got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}") from None
    if step <= 0.0:
        raise UsageError("range step must be positive")
    if hi < lo:
        raise UsageError("range upper endpoint must be >= lower endpoint")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _parse_float_list(text: str, flag: str):
    try:
        values = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise UsageError(f"cannot parse {flag} list {text!r}") from None
    if not values:
        raise UsageError(f"{flag} list is empty")
    return values


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    try:
        spec = SimSpec(n=args.n, rho=args.rho, sigma=args.sigma, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = dataset_csv(simulate_mixture(spec))
    _serialize.write_text(args.out, text)
    print(f"wrote {args.out}: n1={spec.n1} n2={spec.n2}")
    return 0


def _fit_config(args) -> FitConfig:
    if args.lam < 0.0:
        raise UsageError("--lambda must be nonnegative")
    if args.fix_kappa is not None and args.fix_kappa <= 0.0:
        raise UsageError("--fix-kappa must be positive")
    if args.fix_alpha is not None and args.fix_alpha < 0.0:
        raise UsageError("--fix-alpha must be nonnegative")
    return FitConfig(lam=args.lam, fix_kappa=args.fix_kappa,
                     fix_alpha=args.fix_alpha)


def _cmd_fit(args) -> int:
    cfg = _fit_config(args)
    dataset = load_csv(args.data, args.label_col,
                       positive_label=args.positive_label,
                       threshold=args.label_threshold)
    if args.no_standardize:
        used, std = dataset, None
    else:
        used, std = standardize(dataset)
    model = fit(
        design_matrix(used), used.labels, cfg,
        feature_means=None if std is None else std.means,
        feature_scales=None if std is None else std.scales,
    )
    model.save(args.out)
    print(
        f"kappa={model.kappa:.6g} alpha={model.alpha:.6g} "
        f"loglik={model.penalized_loglik:.6g} iters={model.n_iters} "
        f"converged={str(model.converged).lower()}"
    )
    if args.strict and not model.converged:
        print("error: fit did not converge", file=sys.stderr)
        return 3
    return 0


def _load_model(path) -> FittedModel:
    try:
        return FittedModel.load(path)
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed model file {path}: {exc}") from exc


def _cmd_predict(args) -> int:
    model = _load_model(args.model)
    names, matrix = load_features(args.data)
    if args.label_col is not None:
        if args.label_col not in names:
            raise DataError(f"{args.data}: no column named {args.label_col!r}")
        keep = [i for i, name in enumerate(names) if name != args.label_col]
        # contiguous copy: keeps the matmul bit-identical with library calls
        matrix = np.ascontiguousarray(matrix[:, keep])
    if matrix.shape[1] != model.beta.shape[0]:
        raise DataError(
            f"{args.data}: model expects {model.beta.shape[0]} feature "
            f"columns, file has {matrix.shape[1]}"
        )
    rows = diagnose(model, matrix)
    lines = ["mu,yhat,variance_weight,point_type"]
    for d in rows:
        lines.append(",".join([
            _serialize.fmt_float(d.mu_hat),
            str(d.predicted_label),
            _serialize.fmt_float(d.variance_weight),
            d.point_type.value,
        ]))
    _serialize.write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.out}: {len(rows)} predictions")
    return 0


def _cv_csv_path(out: str) -> str:
    return out[: -len(".json")] + ".csv" if out.endswith(".json") else out + ".csv"


def _cmd_cv(args) -> int:
    if args.folds < 2:
        raise UsageError("--folds must be >= 2")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    grid = parse_log_grid(args.grid)
    dataset = load_csv(args.data, args.label_col,
                       positive_label=args.positive_label,
                       threshold=args.label_threshold)
    if not args.no_standardize:
        dataset = standardize(dataset)[0]
    try:
        report = cross_validate(
            design_matrix(dataset), dataset.labels, FitConfig(), grid,
            k=args.folds, reps=args.reps, seed=args.seed, n_jobs=args.jobs,
        )
    except ValueError as exc:
        raise DataError(str(exc)) from None
    _serialize.write_text(args.out, report.to_json())
    csv_path = _cv_csv_path(args.out)
    _serialize.write_text(csv_path, report.to_csv())
    best = float(np.nanmax(report.means))
    print(
        f"wrote {args.out} and {csv_path}: selected lambda="
        f"{report.selected_lambda:.6g} (mean mcc {best:.6g})"
    )
    return 0


def _cmd_curves(args) -> int:
    if args.kappa <= 0.0:
        raise UsageError("--kappa must be positive")
    if args.delta_of_kappa:
        if args.kappa < 1.0:
            raise UsageError("--delta-of-kappa needs kappa >= 1 so delta = 1 - 1/kappa >= 0")
        alpha = args.kappa * (1.0 - 1.0 / args.kappa)
    elif args.delta is not None:
        if args.delta < 0.0:
            raise UsageError("--delta must be nonnegative")
        alpha = args.kappa * args.delta
    elif args.alpha is not None:
        if args.alpha < 0.0:
            raise UsageError("--alpha must be nonnegative")
        alpha = args.alpha
    else:
        alpha = 0.0
    params = FamilyParams(kappa=args.kappa, alpha=alpha)
    thetas = parse_range(args.range)
    # mu column: bin midpoints (i + 1/2)/m of (0, 1), one per theta row
    m = thetas.size
    mus = (np.arange(m) + 0.5) / m
    b = np.atleast_1d(params.cumulant(thetas))
    mean = np.atleast_1d(params.mean(thetas))
    var = np.atleast_1d(params.variance_at_theta(thetas))
    vom = np.atleast_1d(params.variance_of_mean(mus))
    lines = ["theta,cumulant,mean,variance,mu,variance_of_mean"]
    for i in range(m):
        lines.append(",".join(_serialize.fmt_float(v) for v in (
            thetas[i], b[i], mean[i], var[i], mus[i], vom[i],
        )))
    _serialize.write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.out}: {m} rows (kappa={args.kappa:.6g}, alpha={alpha:.6g})")
    return 0


def _cmd_bench(args) -> int:
    rhos = _parse_float_list(args.rhos, "--rhos")
    sigmas = _parse_float_list(args.sigmas, "--sigmas")
    if any(not 0.0 < r <= 0.5 for r in rhos):
        raise UsageError("every rho must lie in (0, 0.5]")
    if any(s <= 0.0 for s in sigmas):
        raise UsageError("every sigma must be positive")
    if args.n < 2 or args.reps < 1:
        raise UsageError("need --n >= 2 and --reps >= 1")
    rows = run_factorial(rhos, sigmas, n=args.n, reps=args.reps,
                         base_seed=args.seed, n_jobs=args.jobs)
    _serialize.write_text(args.out, bench_csv(rows))
    print(f"wrote {args.out}: {len(rows)} rows")
    failed = any(math.isnan(r.mcc) or not r.converged for r in rows)
    if args.strict and failed:
        print("error: some cells failed or did not converge", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _add_label_flags(p) -> None:
    p.add_argument("--label-col", required=True, help="name of the label column")
    rule = p.add_mutually_exclusive_group()
    rule.add_argument("--positive-label", default=None,
                      help="cells exactly equal to this string become label 1")
    rule.add_argument("--label-threshold", type=float, default=None,
                      help="numeric labels >= this become 1")
    p.add_argument("--no-standardize", action="store_true",
                   help="fit on raw feature scales")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="softsvm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw the planar two-class mixture")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--rho", type=float, default=0.5, help="class imbalance in (0, 0.5]")
    p.add_argument("--sigma", type=float, default=1.0, help="per-coordinate noise sd")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit a model to a labeled CSV")
    p.add_argument("--data", required=True)
    _add_label_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="ridge penalty on non-intercept coefficients")
    p.add_argument("--fix-kappa", type=float, default=None)
    p.add_argument("--fix-alpha", type=float, default=None)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 if the fit does not converge")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("predict", help="score feature rows with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default=None,
                   help="optional column to ignore (e.g. the training labels)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("cv", help="cross-validate the penalty grid")
    p.add_argument("--data", required=True)
    _add_label_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--grid", default="1e-4:1e2:13",
                   help="lambda grid as lo:hi:count (log-spaced, inclusive)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="report JSON path (CSV written alongside)")
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("curves", help="emit family curves on a theta grid")
    p.add_argument("--kappa", type=float, required=True)
    shape = p.add_mutually_exclusive_group()
    shape.add_argument("--alpha", type=float, default=None)
    shape.add_argument("--delta", type=float, default=None)
    shape.add_argument("--delta-of-kappa", action="store_true",
                       help="couple delta = 1 - 1/kappa")
    p.add_argument("--range", default="-6:6:0.01", help="theta grid as lo:hi:step")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_curves)

    p = sub.add_parser("bench", help="factorial simulation study")
    p.add_argument("--rhos", default="0.125,0.25,0.5", help="comma-separated")
    p.add_argument("--sigmas", default="0.5,1,1.5", help="comma-separated")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 if any cell fails or does not converge")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
