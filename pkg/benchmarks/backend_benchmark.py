"""Benchmark the compiled kernel backend against the pure-NumPy fallback.

Times the elementwise kernels on large arrays and a full model fit under
each backend, then prints a side-by-side table with speedups. Run as:

    python3 benchmarks/backend_benchmark.py [--size N] [--repeats R] [--fit-reps F]
"""

import argparse
import time

import numpy as np

import softsvm._backend as backend_mod
from softsvm import _kernels_py
from softsvm.data import SimSpec, design_matrix, simulate_mixture
from softsvm.solver import FitConfig, fit

try:
    from softsvm import _kernels
except ImportError:
    _kernels = None


def best_time(func, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(size):
    rng = np.random.default_rng(0)
    x = rng.uniform(-40.0, 40.0, size)
    eta = np.ascontiguousarray(rng.uniform(-8.0, 8.0, size))
    y = np.ascontiguousarray((rng.uniform(size=size) < 0.5).astype(np.float64))
    return [
        ("log1pe", lambda k: k.log1pe(x)),
        ("expit", lambda k: k.expit(x)),
        ("bernoulli_var", lambda k: k.bernoulli_var(x)),
        ("log_cosh", lambda k: k.log_cosh(x)),
        ("asinh_exp", lambda k: k.asinh_exp(x)),
        ("cumulant", lambda k: k.cumulant(2.0, 1.0, eta)),
        ("mean", lambda k: k.mean(2.0, 1.0, eta)),
        ("inverse_mean", lambda k: k.inverse_mean(2.0, 1.0, k.mean(2.0, 1.0, eta))),
        ("loglik_from_eta", lambda k: k.loglik_from_eta(2.0, 1.0, eta, y)),
        ("irls_terms", lambda k: k.irls_terms(2.0, 1.0, eta, y)),
    ]


def timed_fit(fit_reps):
    ds = simulate_mixture(SimSpec(n=400, rho=0.5, sigma=1.0, seed=11))
    X, y = design_matrix(ds.features), ds.labels.astype(np.float64)

    def run():
        for _ in range(fit_reps):
            fit(X, y, FitConfig(lam=0.5))

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=1_000_000,
                        help="array length for elementwise kernels")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats (best is reported)")
    parser.add_argument("--fit-reps", type=int, default=20,
                        help="model fits per timing sample")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled extension not built; nothing to compare "
              "(pip install -e . --no-build-isolation)")
        return

    rows = []
    for name, call in kernel_cases(args.size):
        t_py = best_time(lambda: call(_kernels_py), args.repeats)
        t_c = best_time(lambda: call(_kernels), args.repeats)
        rows.append((name, t_py, t_c))

    fit_row = []
    saved = backend_mod.kernels
    try:
        for kernels in (_kernels_py, _kernels):
            backend_mod.kernels = kernels
            fit_row.append(best_time(timed_fit(args.fit_reps), args.repeats))
    finally:
        backend_mod.kernels = saved
    rows.append((f"fit x{args.fit_reps} (n=400)", fit_row[0], fit_row[1]))

    width = max(len(name) for name, _, _ in rows)
    print(f"elementwise arrays of {args.size:,} doubles, best of {args.repeats}")
    print(f"{'kernel':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>7}")
    for name, t_py, t_c in rows:
        print(f"{name:<{width}}  {t_py * 1e3:>8.2f}ms  {t_c * 1e3:>8.2f}ms  "
              f"{t_py / t_c:>6.2f}x")


if __name__ == "__main__":
    main()
