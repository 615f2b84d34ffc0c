"""Numerically stable scalar primitives.

Every family function is assembled from these. Each one is exact to
working (64-bit) precision on the whole finite range, with explicit
branch partitions at thresholds derived from the machine epsilon so that
no intermediate exp/log overflows or loses the leading digits.

All functions accept scalars or array-likes and return a float or an
ndarray of the same shape. They are pure and thread-safe.
"""

from __future__ import annotations

from . import _backend
from ._backend import elementwise

__all__ = [
    "EPS",
    "log1pe",
    "softplus",
    "log_cosh",
    "asinh_exp",
    "log_sinh",
    "expit",
    "bernoulli_var",
]

#: Machine epsilon of the working precision (64-bit binary float).
EPS = _backend.kernels.EPS


def log1pe(x):
    """log(1 + e^x), the softplus at unit softness.

    Branches: x for x > -log(eps); x + log1p(e^-x) for x > 0;
    log1p(e^x) for x >= log(eps); 0 below. Monotone, >= max(x, 0).
    """
    return elementwise("log1pe", x)


def softplus(kappa, x):
    """p_kappa(x) = log(1 + e^(kappa x)) / kappa.

    A smooth convex upper bound on max(x, 0), approaching it as kappa
    grows: |p_kappa(x) - max(x, 0)| <= log(2)/kappa. Satisfies the
    antisymmetry identity p_kappa(x) - p_kappa(-x) = x.
    """
    if not kappa > 0.0:
        raise ValueError(f"softplus requires kappa > 0, got {kappa}")
    return elementwise("softplus", float(kappa), x)


def log_cosh(x):
    """log(cosh(x)), even in x, exact for |x| up to overflow scale.

    |x| - log(2) once |x| > -log(sqrt(eps)); below that the correction
    log1pe(-2|x|) is added. Evenness comes from using |x| throughout.
    """
    return elementwise("log_cosh", x)


def asinh_exp(x):
    """asinh(e^x) = log(e^x + sqrt(1 + e^(2x))), stable at both tails.

    For x > 0 this is x + log1p(gamma) with gamma = sqrt(1 + e^(-2x))
    (gamma = 1 once the correction underflows). For x <= 0 it is
    log1p(e^x + (gamma - 1)) with gamma - 1 computed by a conjugate
    expression, which keeps full relative precision down to the
    asinh_exp(x) ~ e^x tail.
    """
    return elementwise("asinh_exp", x)


def log_sinh(x):
    """log|sinh(x)| = |x| - log(2) + log(1 - e^(-2|x|)), x != 0.

    Diverges to -inf at 0, so 0 is a domain error; callers special-case
    it analytically.
    """
    import numpy as np

    if np.any(np.asarray(x) == 0.0):
        raise ValueError("log_sinh is undefined at x = 0")
    return elementwise("log_sinh", x)


def expit(x):
    """Logistic sigmoid 1/(1 + e^-x), overflow-safe via sign branch."""
    return elementwise("expit", x)


def bernoulli_var(x):
    """v(x) = expit(x) * expit(-x) = e^x / (1 + e^x)^2, even, max 1/4."""
    return elementwise("bernoulli_var", x)
