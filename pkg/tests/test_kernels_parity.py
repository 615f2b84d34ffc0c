"""Elementwise agreement between the compiled and pure-NumPy backends.

Both implementations share the same branch thresholds, so away from
branch-sensitive rounding they should agree to within a few ulps.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from softsvm import _kernels_py

_compiled = pytest.importorskip(
    "softsvm._kernels", reason="compiled extension not built"
)

RTOL = 5e-15
ATOL = 5e-15

UNARY = [
    "log1pe",
    "log_cosh",
    "asinh_exp",
    "expit",
    "bernoulli_var",
]

FAMILY = [
    "cumulant",
    "mean",
    "variance_at_theta",
    "theta_from_eta",
    "dtheta_deta",
    "d2theta_deta2",
    "eta_from_theta",
]

PARAMS = [(0.5, 0.0), (1.0, 0.0), (1.0, 0.5), (2.0, 1.0), (5.0, 4.0), (100.0, 100.0)]


def grids():
    rng = np.random.default_rng(11)
    dense = np.linspace(-700.0, 700.0, 1401)
    random = rng.normal(scale=20.0, size=2000)
    tiny = np.concatenate([np.geomspace(1e-12, 1.0, 50), -np.geomspace(1e-12, 1.0, 50)])
    return np.ascontiguousarray(np.concatenate([dense, random, tiny]))


X = grids()


@pytest.mark.parametrize("name", UNARY)
def test_unary_parity(name):
    ours = getattr(_compiled, name)(X)
    ref = getattr(_kernels_py, name)(X.copy())
    assert_allclose(ours, ref, rtol=RTOL, atol=ATOL)


def test_softplus_parity():
    for kappa in (0.3, 1.0, 25.0):
        assert_allclose(
            _compiled.softplus(kappa, X),
            _kernels_py.softplus(kappa, X.copy()),
            rtol=RTOL,
            atol=ATOL,
        )


def test_log_sinh_parity():
    x = X[X != 0.0]
    assert_allclose(
        _compiled.log_sinh(x), _kernels_py.log_sinh(x.copy()), rtol=RTOL, atol=ATOL
    )


@pytest.mark.parametrize("name", FAMILY)
@pytest.mark.parametrize("kappa,alpha", PARAMS)
def test_family_parity(name, kappa, alpha):
    scale = min(1.0, 700.0 / (8.0 * kappa))
    x = np.ascontiguousarray(X * scale)
    ours = getattr(_compiled, name)(kappa, alpha, x)
    ref = getattr(_kernels_py, name)(kappa, alpha, x.copy())
    assert_allclose(ours, ref, rtol=RTOL, atol=ATOL)


@pytest.mark.parametrize("kappa,alpha", PARAMS)
def test_inverse_mean_parity(kappa, alpha):
    mu = np.ascontiguousarray(
        np.concatenate(
            [
                np.linspace(1e-12, 1.0 - 1e-12, 501),
                np.array([0.5, 0.5 - 1e-9, 0.5 + 1e-9]),
            ]
        )
    )
    ours = _compiled.inverse_mean(kappa, alpha, mu)
    ref = _kernels_py.inverse_mean(kappa, alpha, mu.copy())
    assert_allclose(ours, ref, rtol=RTOL, atol=ATOL)


def test_loglik_parity():
    rng = np.random.default_rng(5)
    eta = np.ascontiguousarray(rng.normal(scale=3.0, size=500))
    y = np.ascontiguousarray(rng.integers(0, 2, size=500).astype(np.float64))
    for kappa, alpha in PARAMS:
        ours = _compiled.loglik_from_eta(kappa, alpha, eta, y)
        ref = _kernels_py.loglik_from_eta(kappa, alpha, eta.copy(), y.copy())
        assert ours == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_irls_terms_parity():
    rng = np.random.default_rng(6)
    eta = np.ascontiguousarray(rng.normal(scale=2.0, size=300))
    y = np.ascontiguousarray(rng.integers(0, 2, size=300).astype(np.float64))
    for kappa, alpha in PARAMS[:5]:
        ours = _compiled.irls_terms(kappa, alpha, eta, y)
        ref = _kernels_py.irls_terms(kappa, alpha, eta.copy(), y.copy())
        assert len(ours) == len(ref) == 5
        for a, b in zip(ours, ref):
            assert_allclose(np.asarray(a), b, rtol=1e-13, atol=1e-15)


def test_backend_markers():
    assert _compiled.BACKEND == "compiled"
    assert _kernels_py.BACKEND == "python"
