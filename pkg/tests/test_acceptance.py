"""Acceptance gate: nine primary criteria at their stated tolerances.

Each test computes its criterion, records a one-line verdict (replayed
by conftest in the terminal summary), and then asserts. High-precision
references use mpmath at 40 digits; the logistic reference is an
independent in-module IRLS implementation.
"""

import math
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import scipy.special

from softsvm.cli import main as cli_main
from softsvm.data import SimSpec, design_matrix, load_csv, simulate_mixture, standardize
from softsvm.evaluation import ConfusionMatrix, cross_validate, mcc
from softsvm.family import FamilyParams, hinge_cumulant, variance_shape
from softsvm.model import diagnose
from softsvm.solver import FitConfig, fit
from softsvm import stable

mp.mp.dps = 40

LOG2 = math.log(2.0)

KAPPAS = (0.5, 1.0, 2.0, 5.0, 20.0)
ALPHAS = (0.0, 0.5, 1.0, 4.0)


VERDICT_LOG = Path(__file__).with_name(".acceptance_verdicts")


def verdict(num: int, name: str, ok: bool, detail: str) -> str:
    line = f"[criterion {num}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
    with VERDICT_LOG.open("a") as handle:
        handle.write(line + "\n")
    print(line)
    return line


def logistic_irls(X, y, lam=0.0, iters=80):
    beta = np.zeros(X.shape[1])
    pen = np.zeros(X.shape[1])
    pen[1:] = lam
    for _ in range(iters):
        mu = 1.0 / (1.0 + np.exp(-(X @ beta)))
        H = (X * (mu * (1.0 - mu))[:, None]).T @ X + np.diag(pen)
        beta = beta + np.linalg.solve(H, X.T @ (y - mu) - pen * beta)
    return beta


def test_criterion_1_logistic_reduction():
    t0 = time.perf_counter()
    fam = FamilyParams(kappa=1.0, alpha=0.0)
    theta = np.linspace(-700.0, 700.0, 701)
    dev_b = np.max(np.abs(fam.cumulant(theta) - np.logaddexp(0.0, theta)))
    dev_mu = np.max(np.abs(fam.mean(theta) - scipy.special.expit(theta)))
    grid_mu = np.linspace(1e-6, 1.0 - 1e-6, 2001)
    dev_link = np.max(np.abs(fam.link(grid_mu) - scipy.special.logit(grid_mu)))
    grid_dev = max(dev_b, dev_mu, dev_link)

    ds = simulate_mixture(SimSpec(n=200, rho=0.5, sigma=1.5, seed=7))
    X, y = design_matrix(ds.features), ds.labels.astype(np.float64)
    model = fit(X, y, FitConfig(lam=0.0, fix_kappa=1.0, fix_alpha=0.0,
                                tol=1e-12, max_outer_iters=300))
    coef_dev = np.max(np.abs(model.coefficients - logistic_irls(X, y)))
    dt = time.perf_counter() - t0

    ok = grid_dev <= 1e-12 and coef_dev <= 1e-6 and dt < 1.0
    line = verdict(1, "logistic reduction", ok,
                   f"grid dev {grid_dev:.2e} (tol 1e-12), "
                   f"coef dev {coef_dev:.2e} (tol 1e-6), {dt:.2f}s (<1s)")
    assert ok, line


def test_criterion_2_svm_limit_bound():
    t0 = time.perf_counter()
    theta = np.arange(-6.0, 6.0 + 0.005, 0.01)
    hinge = hinge_cumulant(theta)
    sups = {}
    for kappa in (10.0, 100.0, 1000.0):
        fam = FamilyParams(kappa=kappa, alpha=kappa)  # delta = 1
        sups[kappa] = float(np.max(np.abs(fam.cumulant(theta) - hinge)))
    dt = time.perf_counter() - t0

    ok = all(sup <= LOG2 / kappa for kappa, sup in sups.items()) and dt < 1.0
    detail = ", ".join(f"k={int(k)}: sup {s:.2e} <= {LOG2 / k:.2e}"
                       for k, s in sups.items())
    line = verdict(2, "SVM-limit bound", ok, f"{detail}, {dt:.2f}s (<1s)")
    assert ok, line


def test_criterion_3_derivatives_and_roundtrips():
    h = 1e-5
    theta = np.linspace(-30.0, 30.0, 241)
    fd_dev = 0.0
    for kappa in KAPPAS:
        for alpha in ALPHAS:
            fam = FamilyParams(kappa=kappa, alpha=alpha)
            fd_dev = max(fd_dev, np.max(np.abs(
                fam.mean(theta) - (fam.cumulant(theta + h) - fam.cumulant(theta - h)) / (2 * h)
            )))
            fd_dev = max(fd_dev, np.max(np.abs(
                fam.variance_at_theta(theta)
                - (fam.mean(theta + h) - fam.mean(theta - h)) / (2 * h)
            )))
            fd_dev = max(fd_dev, np.max(np.abs(
                fam.dtheta_deta(theta)
                - (fam.theta_from_eta(theta + h) - fam.theta_from_eta(theta - h)) / (2 * h)
            )))
            fd_dev = max(fd_dev, np.max(np.abs(
                fam.d2theta_deta2(theta)
                - (fam.dtheta_deta(theta + h) - fam.dtheta_deta(theta - h)) / (2 * h)
            )))

    # roundtrips wherever the float64 mean still resolves theta: the band
    # min(mu, 1-mu) <= 1e-6 carries too little information for 1e-9
    grid = np.linspace(-15.0, 15.0, 301)
    rt_dev = 0.0
    n_kept = 0
    for kappa in KAPPAS:
        for alpha in ALPHAS:
            fam = FamilyParams(kappa=kappa, alpha=alpha)
            mu = fam.mean(grid)
            keep = np.minimum(mu, 1.0 - mu) > 1e-6
            n_kept += int(np.sum(keep))
            rt_dev = max(rt_dev, np.max(np.abs(fam.inverse_mean(mu[keep]) - grid[keep])))
            rt_dev = max(rt_dev, np.max(np.abs(
                fam.eta_from_theta(fam.theta_from_eta(grid)) - grid
            )))
            mu_eta = fam.mean_from_eta(grid)
            keep = np.minimum(mu_eta, 1.0 - mu_eta) > 1e-6
            rt_dev = max(rt_dev, np.max(np.abs(fam.link(mu_eta[keep]) - grid[keep])))

    ok = fd_dev <= 1e-6 and rt_dev <= 1e-9
    line = verdict(3, "derivatives and roundtrips", ok,
                   f"FD dev {fd_dev:.2e} (tol 1e-6), roundtrip dev {rt_dev:.2e} "
                   f"(tol 1e-9, {n_kept} unsaturated points kept)")
    assert ok, line


def test_criterion_4_stability_suite():
    grid = np.unique(np.concatenate([
        np.linspace(-700.0, 700.0, 401),
        np.geomspace(1e-10, 700.0, 60),
        -np.geomspace(1e-10, 700.0, 60),
    ]))
    oracles = {
        "log1pe": lambda x: mp.log(1 + mp.e**x),
        "log_cosh": lambda x: mp.log(mp.cosh(x)),
        "asinh_exp": lambda x: mp.asinh(mp.e**x),
        "expit": lambda x: 1 / (1 + mp.e**(-x)),
        "bernoulli_var": lambda x: 1 / ((1 + mp.e**(-x)) * (1 + mp.e**x)),
        "log_sinh": lambda x: mp.log(abs(mp.sinh(x))),
    }
    # 1e-12 relative, with one-ulp absolute slack where the prescribed
    # branches truncate terms below machine precision (e.g. log1pe -> 0)
    worst = {}
    ok = True
    for name, oracle in oracles.items():
        x = grid[grid != 0.0] if name == "log_sinh" else grid
        ours = getattr(stable, name)(x)
        ref = np.array([float(oracle(mp.mpf(v))) for v in x])
        dev = np.abs(ours - ref) / np.maximum(np.abs(ref), 1e-300)
        covered = np.abs(ours - ref) <= 2e-15
        worst[name] = float(np.max(np.where(covered, 0.0, dev)))
        ok = ok and np.all((dev <= 1e-12) | covered) and np.all(np.isfinite(ours))
    big = np.array([-1e6, 1e6])
    for name in oracles:
        ok = ok and bool(np.all(np.isfinite(getattr(stable, name)(big))))
    ok = ok and bool(np.all(np.isfinite(stable.softplus(2.0, big))))

    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    line = verdict(4, "stability vs 40-digit oracle", ok,
                   f"rel dev (tol 1e-12, atol 2e-15 at prescribed truncation): "
                   f"{detail}; finite at |x|=1e6")
    assert ok, line


def test_criterion_5_variance_shape():
    mu = np.linspace(0.001, 0.999, 2001)
    counts = {}
    for alpha in (0.5, 1.0):
        v = FamilyParams(kappa=1.0, alpha=alpha).variance_of_mean(mu)
        counts[alpha] = int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])))

    fac_dev = 0.0
    mu_f = np.linspace(0.01, 0.99, 99)
    for kappa in (1.0, 2.0, 5.0):
        for alpha in ALPHAS:
            fam = FamilyParams(kappa=kappa, alpha=alpha)
            fac_dev = max(fac_dev, np.max(np.abs(
                fam.variance_of_mean(mu_f) - kappa * variance_shape(alpha, mu_f)
            )))

    ok = counts[0.5] == 1 and counts[1.0] == 2 and fac_dev <= 1e-10
    line = verdict(5, "variance modality and dispersion factorization", ok,
                   f"maxima alpha=0.5: {counts[0.5]} (want 1), alpha=1.0: "
                   f"{counts[1.0]} (want 2), factorization dev {fac_dev:.2e} (tol 1e-10)")
    assert ok, line


def test_criterion_6_monotone_ascent():
    t0 = time.perf_counter()
    worst_drop = 0.0
    n_fits = 0
    max_iters_ok = True
    for rho in (0.125, 0.5):
        for sigma in (0.5, 1.5):
            for seed in range(25):
                for lam in (0.0, 1.0):
                    ds = simulate_mixture(SimSpec(n=60, rho=rho, sigma=sigma, seed=seed))
                    X, y = design_matrix(ds.features), ds.labels.astype(np.float64)
                    trace = []
                    model = fit(X, y, FitConfig(lam=lam),
                                callback=lambda i, ll: trace.append(ll))
                    drops = np.diff(np.asarray(trace))
                    worst_drop = min(worst_drop, float(np.min(drops, initial=0.0)))
                    max_iters_ok = max_iters_ok and model.n_iters <= 100
                    n_fits += 1

    sep_ok = True
    sep_norm = 0.0
    for rho in (0.125, 0.5):
        for seed in range(5):
            ds = simulate_mixture(SimSpec(n=60, rho=rho, sigma=0.25, seed=seed))
            X, y = design_matrix(ds.features), ds.labels.astype(np.float64)
            model = fit(X, y, FitConfig(lam=1.0))
            sep_ok = sep_ok and model.converged
            sep_norm = max(sep_norm, float(np.linalg.norm(model.coefficients)))
    dt = time.perf_counter() - t0

    ok = worst_drop >= -1e-12 and max_iters_ok and sep_ok and sep_norm <= 100.0 and dt < 60.0
    line = verdict(6, "monotone ascent over 200 seeded fits", ok,
                   f"worst objective drop {worst_drop:.2e} (slack 1e-12) over "
                   f"{n_fits} fits; separated-data fits converged={sep_ok} with "
                   f"max norm {sep_norm:.3g} (<=100); {dt:.1f}s (<60s)")
    assert ok, line


def test_criterion_7_simulation_study(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "bench.csv"
    rc = cli_main(["bench", "--rhos", "0.125,0.25,0.5", "--sigmas", "0.5,1,1.5",
                   "--n", "100", "--reps", "50", "--seed", "0", "--out", str(out)])
    assert rc == 0
    cell = {}
    for row in out.read_text().splitlines()[1:]:
        rho, sigma, rep, method, mcc_txt, converged, norm = row.split(",")
        cell.setdefault((float(rho), float(sigma), method), []).append(float(mcc_txt))

    margins = {}
    for rho in (0.125, 0.25, 0.5):
        for sigma in (0.5, 1.0, 1.5):
            soft = float(np.mean(cell[(rho, sigma, "softsvm")]))
            logistic = float(np.mean(cell[(rho, sigma, "logistic")]))
            margins[(rho, sigma)] = soft - logistic
    min_margin = min(margins.values())

    seq = [float(np.mean(cell[(0.5, s, "softsvm")])) for s in (0.5, 1.0, 1.5)]
    monotone = seq[0] > seq[1] > seq[2]
    dt = time.perf_counter() - t0

    ok = min_margin >= -0.05 and monotone
    line = verdict(7, "factorial study vs logistic", ok,
                   f"min per-cell MCC margin {min_margin:+.3f} (tol -0.05); "
                   f"mean MCC at rho=0.5 over sigma: "
                   f"{seq[0]:.3f} > {seq[1]:.3f} > {seq[2]:.3f} is {monotone}; "
                   f"{dt:.0f}s")
    assert ok, line


def test_criterion_8_mcc_units():
    hand = mcc(ConfusionMatrix(tp=45, fp=10, tn=40, fn=5))
    checks = {
        "perfect": mcc(ConfusionMatrix(tp=30, fp=0, tn=20, fn=0)) == 1.0,
        "inverted": mcc(ConfusionMatrix(tp=0, fp=20, tn=0, fn=30)) == -1.0,
        "degenerate": mcc(ConfusionMatrix(tp=5, fp=5, tn=0, fn=0)) == 0.0,
        "hand": abs(hand - 0.703526) <= 1e-6,
    }
    ok = all(checks.values())
    line = verdict(8, "MCC unit values", ok,
                   f"perfect/inverted/degenerate {checks['perfect']}/"
                   f"{checks['inverted']}/{checks['degenerate']}, "
                   f"hand case {hand:.9f} (0.703526 +- 1e-6)")
    assert ok, line


def test_criterion_9_determinism_and_parity(tmp_path):
    # byte-identical reruns
    rerun_ok = True
    for name, argv in {
        "sim": lambda p: ["simulate", "--n", "60", "--seed", "3", "--out", p],
        "curves": lambda p: ["curves", "--kappa", "2", "--alpha", "1",
                             "--range=-2:2:0.5", "--out", p],
    }.items():
        paths = [str(tmp_path / f"{name}{i}.csv") for i in (0, 1)]
        for p in paths:
            assert cli_main(argv(p)) == 0
        rerun_ok = rerun_ok and (
            (tmp_path / f"{name}0.csv").read_bytes() == (tmp_path / f"{name}1.csv").read_bytes()
        )

    data = tmp_path / "train.csv"
    assert cli_main(["simulate", "--n", "60", "--seed", "3", "--out", str(data)]) == 0
    model_paths = [str(tmp_path / f"m{i}.json") for i in (0, 1)]
    for p in model_paths:
        assert cli_main(["fit", "--data", str(data), "--label-col", "y",
                         "--lambda", "0.5", "--out", p]) == 0
    rerun_ok = rerun_ok and (
        (tmp_path / "m0.json").read_bytes() == (tmp_path / "m1.json").read_bytes()
    )
    cv_paths = [str(tmp_path / f"cv{i}.json") for i in (0, 1)]
    for p in cv_paths:
        assert cli_main(["cv", "--data", str(data), "--label-col", "y", "--folds", "3",
                         "--reps", "2", "--grid", "0.1:10:3", "--seed", "1",
                         "--out", p]) == 0
    rerun_ok = rerun_ok and (
        (tmp_path / "cv0.json").read_bytes() == (tmp_path / "cv1.json").read_bytes()
        and (tmp_path / "cv0.csv").read_bytes() == (tmp_path / "cv1.csv").read_bytes()
    )

    # CLI output equals the corresponding library calls exactly
    ds = load_csv(data, "y")
    used, std = standardize(ds)
    X = design_matrix(used)
    lib_model = fit(X, used.labels, FitConfig(lam=0.5),
                    feature_means=std.means, feature_scales=std.scales)
    fit_parity = (tmp_path / "m0.json").read_text() == lib_model.to_json()

    pred_path = tmp_path / "pred.csv"
    assert cli_main(["predict", "--model", model_paths[0], "--data", str(data),
                     "--label-col", "y", "--out", str(pred_path)]) == 0
    lib_diag = diagnose(lib_model, ds.features)
    pred_parity = True
    for row, d in zip(pred_path.read_text().splitlines()[1:], lib_diag):
        mu_txt, yhat, weight_txt, kind = row.split(",")
        pred_parity = pred_parity and (
            float(mu_txt) == d.mu_hat
            and int(yhat) == d.predicted_label
            and float(weight_txt) == d.variance_weight
            and kind == d.point_type.value
        )

    lib_report = cross_validate(X, used.labels, FitConfig(),
                                np.geomspace(0.1, 10.0, 3), k=3, reps=2, seed=1)
    cv_parity = (tmp_path / "cv0.json").read_text() == lib_report.to_json()

    ok = rerun_ok and fit_parity and pred_parity and cv_parity
    line = verdict(9, "determinism and CLI/library parity", ok,
                   f"byte-identical reruns={rerun_ok}, fit JSON equal={fit_parity}, "
                   f"predictions equal={pred_parity}, cv report equal={cv_parity}")
    assert ok, line
