# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled elementwise kernels (hot backend).

Same API and branch structure as ``softsvm._kernels_py``; see that module
for the contracts. Scalar helpers are plain C functions so the array loops
run without Python overhead, which is what makes the fitting and
cross-validation loops fast.
"""

import numpy as np

cimport numpy as cnp
from libc.float cimport DBL_EPSILON
from libc.math cimport exp, expm1, fabs, log, log1p, sqrt

cnp.import_array()

BACKEND = "compiled"

cdef double LOG_EPS = log(DBL_EPSILON)
cdef double NEG_LOG_EPS = -LOG_EPS
cdef double NEG_LOG_SQRT_EPS = -0.5 * LOG_EPS
cdef double LOG2 = log(2.0)

EPS = DBL_EPSILON


# ---------------------------------------------------------------------------
# Scalar C helpers
# ---------------------------------------------------------------------------

cdef inline double c_log1pe(double x) noexcept nogil:
    if x > NEG_LOG_EPS:
        return x
    if x > 0.0:
        return x + log1p(exp(-x))
    if x >= LOG_EPS:
        return log1p(exp(x))
    return 0.0


cdef inline double c_log_cosh(double x) noexcept nogil:
    cdef double ax = fabs(x)
    if ax > NEG_LOG_SQRT_EPS:
        return ax - LOG2
    return ax - LOG2 + c_log1pe(-2.0 * ax)


cdef inline double c_asinh_exp(double x) noexcept nogil:
    cdef double gamma, w, gm1
    if x > 0.0:
        if x > NEG_LOG_SQRT_EPS:
            gamma = 1.0
        else:
            gamma = sqrt(1.0 + exp(-2.0 * x))
        return x + log1p(gamma)
    w = exp(2.0 * x)
    gm1 = w / (1.0 + sqrt(1.0 + w))
    return log1p(exp(x) + gm1)


cdef inline double c_log_sinh(double x) noexcept nogil:
    cdef double ax = fabs(x)
    return ax - LOG2 + log(-expm1(-2.0 * ax))


cdef inline double c_expit(double x) noexcept nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double c_bvar(double x) noexcept nogil:
    return c_expit(x) * c_expit(-x)


cdef inline double c_theta_from_eta(double kappa, double alpha, double eta) noexcept nogil:
    cdef double ke = kappa * eta
    return (c_log1pe(ke + alpha) - c_log1pe(alpha - ke)) / kappa


cdef inline double c_cumulant(double kappa, double alpha, double theta) noexcept nogil:
    cdef double kt = kappa * theta
    return (c_log1pe(kt + 2.0 * alpha) + c_log1pe(kt - 2.0 * alpha)) / (2.0 * kappa)


# ---------------------------------------------------------------------------
# Array entry points
# ---------------------------------------------------------------------------

def log1pe(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_log1pe(x[i])
    return out


def softplus(double kappa, double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_log1pe(kappa * x[i]) / kappa
    return out


def log_cosh(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_log_cosh(x[i])
    return out


def asinh_exp(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_asinh_exp(x[i])
    return out


def log_sinh(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_log_sinh(x[i])
    return out


def expit(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_expit(x[i])
    return out


def bernoulli_var(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_bvar(x[i])
    return out


def cumulant(double kappa, double alpha, double[::1] theta):
    cdef Py_ssize_t i, n = theta.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_cumulant(kappa, alpha, theta[i])
    return out


def mean(double kappa, double alpha, double[::1] theta):
    cdef Py_ssize_t i, n = theta.shape[0]
    cdef double kt
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        kt = kappa * theta[i]
        o[i] = 0.5 * (c_expit(kt + 2.0 * alpha) + c_expit(kt - 2.0 * alpha))
    return out


def variance_at_theta(double kappa, double alpha, double[::1] theta):
    cdef Py_ssize_t i, n = theta.shape[0]
    cdef double kt
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        kt = kappa * theta[i]
        o[i] = 0.5 * kappa * (c_bvar(kt + 2.0 * alpha) + c_bvar(kt - 2.0 * alpha))
    return out


def theta_from_eta(double kappa, double alpha, double[::1] eta):
    cdef Py_ssize_t i, n = eta.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = c_theta_from_eta(kappa, alpha, eta[i])
    return out


def dtheta_deta(double kappa, double alpha, double[::1] eta):
    cdef Py_ssize_t i, n = eta.shape[0]
    cdef double ke
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        ke = kappa * eta[i]
        o[i] = c_expit(ke + alpha) + c_expit(alpha - ke)
    return out


def d2theta_deta2(double kappa, double alpha, double[::1] eta):
    cdef Py_ssize_t i, n = eta.shape[0]
    cdef double ke
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        ke = kappa * eta[i]
        o[i] = kappa * (c_bvar(ke + alpha) - c_bvar(alpha - ke))
    return out


def inverse_mean(double kappa, double alpha, double[::1] mu):
    cdef Py_ssize_t i, n = mu.shape[0]
    cdef double lc2a = c_log_cosh(2.0 * alpha)
    cdef double m, d, h, logit, sgn
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        m = mu[i]
        d = m - 0.5
        if d == 0.0:
            o[i] = 0.0
            continue
        sgn = 1.0 if d > 0.0 else -1.0
        h = lc2a + log(fabs(d)) - 0.5 * (log(m) + log1p(-m))
        logit = log(m) - log1p(-m)
        o[i] = (0.5 * logit + sgn * c_asinh_exp(h)) / kappa
    return out


def eta_from_theta(double kappa, double alpha, double[::1] theta):
    cdef Py_ssize_t i, n = theta.shape[0]
    cdef double t, big_h, sgn
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        t = theta[i]
        if t == 0.0:
            o[i] = 0.0
            continue
        sgn = 1.0 if t > 0.0 else -1.0
        big_h = -alpha + c_log_sinh(0.5 * kappa * fabs(t))
        o[i] = 0.5 * t + sgn * c_asinh_exp(big_h) / kappa
    return out


def loglik_from_eta(double kappa, double alpha, double[::1] eta, double[::1] y):
    cdef Py_ssize_t i, n = eta.shape[0]
    cdef double s = 0.0, th
    for i in range(n):
        th = c_theta_from_eta(kappa, alpha, eta[i])
        s += y[i] * th - c_cumulant(kappa, alpha, th)
    return s


def irls_terms(double kappa, double alpha, double[::1] eta, double[::1] y):
    cdef Py_ssize_t i, n = eta.shape[0]
    cdef double ke, kt, th, mu_i, sl, cu, we
    theta = np.empty(n)
    mu = np.empty(n)
    slope = np.empty(n)
    w_obs = np.empty(n)
    w_exp = np.empty(n)
    cdef double[::1] o_th = theta, o_mu = mu, o_sl = slope, o_wo = w_obs, o_we = w_exp
    for i in range(n):
        ke = kappa * eta[i]
        th = (c_log1pe(ke + alpha) - c_log1pe(alpha - ke)) / kappa
        kt = kappa * th
        mu_i = 0.5 * (c_expit(kt + 2.0 * alpha) + c_expit(kt - 2.0 * alpha))
        sl = c_expit(ke + alpha) + c_expit(alpha - ke)
        cu = kappa * (c_bvar(ke + alpha) - c_bvar(alpha - ke))
        we = sl * sl * 0.5 * kappa * (c_bvar(kt + 2.0 * alpha) + c_bvar(kt - 2.0 * alpha))
        o_th[i] = th
        o_mu[i] = mu_i
        o_sl[i] = sl
        o_wo[i] = we - (y[i] - mu_i) * cu
        o_we[i] = we
    return theta, mu, slope, w_obs, w_exp
