"""Pure-NumPy elementwise kernels (fallback backend).

Mirrors the API of the compiled ``softsvm._kernels`` extension: every
function takes scalar family parameters followed by 1-d contiguous
float64 arrays and returns a new float64 array (or a Python float for
the fused reductions). All branch thresholds are expressed in terms of
the float64 machine epsilon so that saturating regimes are handled
exactly rather than through overflowing exponentials.

Callers are expected to have validated parameters (kappa > 0, alpha >= 0)
and, for ``inverse_mean``, to pass means already clamped into (0, 1).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

EPS = float(np.finfo(np.float64).eps)
LOG_EPS = math.log(EPS)  # approx -36.04
NEG_LOG_EPS = -LOG_EPS
NEG_LOG_SQRT_EPS = -0.5 * LOG_EPS  # approx 18.02
LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Stable scalar primitives, vectorized
# ---------------------------------------------------------------------------

def log1pe(x):
    """log(1 + e^x) by a four-way domain partition at 0 and +-log(eps)."""
    out = np.empty_like(x)
    hi = x > NEG_LOG_EPS
    lo = x < LOG_EPS
    pos = ~hi & (x > 0.0)
    mid = ~lo & (x <= 0.0)
    out[hi] = x[hi]
    out[pos] = x[pos] + np.log1p(np.exp(-x[pos]))
    out[mid] = np.log1p(np.exp(x[mid]))
    out[lo] = 0.0
    return out


def softplus(kappa, x):
    """Soft relaxation of max(x, 0): log(1 + e^(kappa x)) / kappa."""
    return log1pe(kappa * x) / kappa


def log_cosh(x):
    """log cosh(x) = |x| - log 2 + log(1 + e^(-2|x|)), dropping the tail
    correction once it falls below machine precision."""
    ax = np.abs(x)
    out = ax - LOG2
    small = ax <= NEG_LOG_SQRT_EPS
    out[small] += log1pe(-2.0 * ax[small])
    return out


def asinh_exp(x):
    """asinh(e^x), branched on the sign of x.

    For x > 0 the identity asinh(e^x) = x + log(1 + sqrt(1 + e^(-2x)))
    avoids overflow, with the inner root collapsing to 1 once e^(-2x) is
    below machine precision. For x <= 0 the same root appears as
    gamma = sqrt(1 + e^(2x)); its excess over 1 is computed as
    e^(2x) / (1 + gamma) so the final log1p keeps full relative accuracy
    down to the underflow floor.
    """
    out = np.empty_like(x)
    pos = x > 0.0
    xp = x[pos]
    gamma = np.ones_like(xp)
    small = xp <= NEG_LOG_SQRT_EPS
    gamma[small] = np.sqrt(1.0 + np.exp(-2.0 * xp[small]))
    out[pos] = xp + np.log1p(gamma)
    xn = x[~pos]
    w = np.exp(2.0 * xn)
    gm1 = w / (1.0 + np.sqrt(1.0 + w))
    out[~pos] = np.log1p(np.exp(xn) + gm1)
    return out


def log_sinh(x):
    """log |sinh(x)| = |x| - log 2 + log(1 - e^(-2|x|)); diverges at 0.

    The caller is responsible for excluding x == 0.
    """
    ax = np.abs(x)
    return ax - LOG2 + np.log(-np.expm1(-2.0 * ax))


def expit(x):
    """Logistic function with the usual overflow-safe sign branch."""
    out = np.empty_like(x)
    pos = x >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def bernoulli_var(x):
    """expit(x) * expit(-x), the Bernoulli variance at logit x."""
    return expit(x) * expit(-x)


# ---------------------------------------------------------------------------
# Family functions over the scaled-separation parameterization (kappa, alpha)
# ---------------------------------------------------------------------------
#
# All shifted soft-plus arguments are formed as kappa*t +- c*alpha rather
# than kappa*(t +- c*delta); the two are equal in exact arithmetic and the
# former keeps the kappa*delta product exact.

def cumulant(kappa, alpha, theta):
    kt = kappa * theta
    return (log1pe(kt + 2.0 * alpha) + log1pe(kt - 2.0 * alpha)) / (2.0 * kappa)


def mean(kappa, alpha, theta):
    kt = kappa * theta
    return 0.5 * (expit(kt + 2.0 * alpha) + expit(kt - 2.0 * alpha))


def variance_at_theta(kappa, alpha, theta):
    kt = kappa * theta
    return 0.5 * kappa * (
        bernoulli_var(kt + 2.0 * alpha) + bernoulli_var(kt - 2.0 * alpha)
    )


def theta_from_eta(kappa, alpha, eta):
    ke = kappa * eta
    return (log1pe(ke + alpha) - log1pe(alpha - ke)) / kappa


def dtheta_deta(kappa, alpha, eta):
    ke = kappa * eta
    return expit(ke + alpha) + expit(alpha - ke)


def d2theta_deta2(kappa, alpha, eta):
    ke = kappa * eta
    return kappa * (bernoulli_var(ke + alpha) - bernoulli_var(alpha - ke))


def inverse_mean(kappa, alpha, mu):
    """Inverse of the mean function; mu must already lie in (0, 1).

    mu == 0.5 maps to exactly 0 (the log |mu - 1/2| term diverges there but
    the limit is 0 by symmetry).
    """
    out = np.zeros_like(mu)
    d = mu - 0.5
    nz = d != 0.0
    m = mu[nz]
    dn = d[nz]
    h = _log_cosh_s(2.0 * alpha) + np.log(np.abs(dn)) - 0.5 * (
        np.log(m) + np.log1p(-m)
    )
    logit = np.log(m) - np.log1p(-m)
    out[nz] = (0.5 * logit + np.sign(dn) * asinh_exp(h)) / kappa
    return out


def eta_from_theta(kappa, alpha, theta):
    """Inverse of theta_from_eta; theta == 0 maps to exactly 0."""
    out = np.zeros_like(theta)
    nz = theta != 0.0
    t = theta[nz]
    big_h = -alpha + log_sinh(0.5 * kappa * np.abs(t))
    out[nz] = 0.5 * t + np.sign(t) * asinh_exp(big_h) / kappa
    return out


# ---------------------------------------------------------------------------
# Fused kernels for the fitting loop
# ---------------------------------------------------------------------------

def loglik_from_eta(kappa, alpha, eta, y):
    """Unpenalized log-likelihood sum(y*theta - b(theta)) at eta."""
    theta = theta_from_eta(kappa, alpha, eta)
    return float(y @ theta - cumulant(kappa, alpha, theta).sum())


def irls_terms(kappa, alpha, eta, y):
    """Per-observation quantities for one coefficient update.

    Returns (theta, mu, slope, w_observed, w_expected) where slope is
    dtheta/deta, w_expected = slope^2 * b''(theta) and w_observed is the
    negated per-point log-likelihood curvature
    slope^2 * b''(theta) - (y - mu) * d2theta/deta2.
    """
    theta = theta_from_eta(kappa, alpha, eta)
    mu = mean(kappa, alpha, theta)
    slope = dtheta_deta(kappa, alpha, eta)
    curve = d2theta_deta2(kappa, alpha, eta)
    w_exp = slope * slope * variance_at_theta(kappa, alpha, theta)
    w_obs = w_exp - (y - mu) * curve
    return theta, mu, slope, w_obs, w_exp


def _log_cosh_s(x):
    ax = abs(x)
    if ax > NEG_LOG_SQRT_EPS:
        return ax - LOG2
    return ax - LOG2 + math.log1p(math.exp(-2.0 * ax))
