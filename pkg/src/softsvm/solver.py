"""Regularized Soft-SVM regression fitting.

The objective is the penalized log-likelihood

    l(kappa, alpha, beta) = sum_i [y_i theta_i - b(theta_i)] - (lambda/2) ||beta_{1..f}||^2,

with theta_i = f(eta_i), eta_i the i-th row of X beta, and the intercept
excluded from the penalty. Fitting cycles three monotone steps per outer
iteration: a softness (kappa) step, a separation (alpha) step, and a
coefficient (beta) step, until the relative change in the objective
drops below the tolerance. Every step is safeguarded so the objective
never decreases; non-convergence is reported on the model, not raised.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _backend, _serialize
from .family import FamilyParams

__all__ = [
    "FitConfig",
    "FittedModel",
    "SingularSystemError",
    "solve_penalized_system",
    "initialize",
    "penalized_loglik",
    "beta_step",
    "kappa_step",
    "alpha_step",
    "fit",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SingularSystemError(Exception):
    """The beta-step normal equations were singular even after jitter."""


@dataclass(frozen=True)
class FitConfig:
    """Fitting hyperparameters and safeguards.

    lam is the ridge penalty on non-intercept coefficients; tol the
    relative convergence tolerance on the objective; nu the label
    perturbation used to form initial means (y + nu)/(1 + 2 nu).
    fix_kappa / fix_alpha pin a family parameter (set both to (1, 0)
    for plain logistic regression). weight_mode "observed" uses the
    full Newton weights with a Fisher-scoring fallback; "expected"
    uses Fisher scoring throughout. fd_step is the relative step for
    the finite-difference scores of the kappa and alpha steps.
    """

    lam: float = 0.0
    tol: float = 1e-8
    nu: float = 0.05
    max_outer_iters: int = 100
    max_newton_iters: int = 25
    kappa_bounds: tuple = (1e-2, 1e4)
    alpha_bounds: tuple = (0.0, 50.0)
    fix_kappa: float | None = None
    fix_alpha: float | None = None
    weight_mode: str = "observed"
    fd_step: float = 1e-5

    def __post_init__(self) -> None:
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.nu < 1.0:
            raise ValueError("nu must lie in (0, 1)")
        if self.kappa_bounds[0] >= self.kappa_bounds[1]:
            raise ValueError("kappa_bounds must be ordered")
        if self.alpha_bounds[0] >= self.alpha_bounds[1]:
            raise ValueError("alpha_bounds must be ordered")
        if self.weight_mode not in ("observed", "expected"):
            raise ValueError("weight_mode must be 'observed' or 'expected'")


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Fit result: coefficients, family parameters, convergence record.

    beta holds the non-intercept coefficients on the (possibly
    standardized) feature scale used at fit time; feature_means and
    feature_scales record that transform so prediction can be applied
    to raw features. An unstandardized fit stores the identity
    transform (zero means, unit scales).
    """

    beta0: float
    beta: np.ndarray
    kappa: float
    alpha: float
    penalized_loglik: float
    n_iters: int
    converged: bool
    lam: float
    feature_means: np.ndarray
    feature_scales: np.ndarray

    @property
    def family(self) -> FamilyParams:
        return FamilyParams(kappa=self.kappa, alpha=self.alpha)

    @property
    def coefficients(self) -> np.ndarray:
        """Intercept-first coefficient vector of length f + 1."""
        return np.concatenate(([self.beta0], self.beta))

    def to_document(self) -> dict:
        """Field-ordered mapping matching the model JSON schema."""
        return {
            "family": {"kappa": self.kappa, "alpha": self.alpha},
            "coefficients": {
                "intercept": self.beta0,
                "values": [float(v) for v in self.beta],
            },
            "lambda": self.lam,
            "fit": {
                "loglik": self.penalized_loglik,
                "iters": self.n_iters,
                "converged": self.converged,
            },
            "standardization": {
                "means": [float(v) for v in self.feature_means],
                "scales": [float(v) for v in self.feature_scales],
            },
        }

    def to_json(self) -> str:
        return _serialize.render_json(self.to_document())

    def save(self, path) -> None:
        _serialize.write_text(path, self.to_json())

    @classmethod
    def from_document(cls, doc: dict) -> "FittedModel":
        return cls(
            beta0=float(doc["coefficients"]["intercept"]),
            beta=np.asarray(doc["coefficients"]["values"], dtype=np.float64),
            kappa=float(doc["family"]["kappa"]),
            alpha=float(doc["family"]["alpha"]),
            penalized_loglik=float(doc["fit"]["loglik"]),
            n_iters=int(doc["fit"]["iters"]),
            converged=bool(doc["fit"]["converged"]),
            lam=float(doc["lambda"]),
            feature_means=np.asarray(doc["standardization"]["means"], dtype=np.float64),
            feature_scales=np.asarray(doc["standardization"]["scales"], dtype=np.float64),
        )

    @classmethod
    def load(cls, path) -> "FittedModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_document(json.load(fh))


# ---------------------------------------------------------------------------
# Linear algebra and objective
# ---------------------------------------------------------------------------

def solve_penalized_system(A, b):
    """Solve the SPD system A x = b by Cholesky, with one jitter retry.

    A jitter floor of 1e-10 on the diagonal is tried if the plain
    factorization fails; a second failure raises SingularSystemError.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    for jitter in (0.0, 1e-10):
        try:
            m = A if jitter == 0.0 else A + jitter * np.eye(A.shape[0])
            factor = scipy.linalg.cho_factor(m, lower=True, check_finite=False)
            return scipy.linalg.cho_solve(factor, b, check_finite=False)
        except scipy.linalg.LinAlgError:
            continue
    raise SingularSystemError("normal equations singular after jitter retry")


def _check_inputs(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(
            f"design matrix {X.shape} and labels {y.shape} do not align"
        )
    if X.shape[0] == 0:
        raise ValueError("empty dataset")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("labels must be 0 or 1")
    return X, y


def _pll_from_eta(kappa, alpha, eta, y, lam, beta):
    ll = _backend.kernels.loglik_from_eta(
        kappa, alpha, np.ascontiguousarray(eta), y
    )
    return ll - 0.5 * lam * float(beta[1:] @ beta[1:])


def penalized_loglik(params: FamilyParams, beta, X, y, lam: float) -> float:
    """Objective value at (params, beta): log-likelihood minus ridge term."""
    X, y = _check_inputs(X, y)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape[0] != X.shape[1]:
        raise ValueError(
            f"coefficient length {beta.shape[0]} does not match {X.shape[1]} columns"
        )
    return _pll_from_eta(params.kappa, params.alpha, X @ beta, y, lam, beta)


# ---------------------------------------------------------------------------
# Steps
# ---------------------------------------------------------------------------

def initialize(X, y, cfg: FitConfig):
    """Starting point: perturbed means, linked predictor, ridge projection.

    kappa and alpha start at 1 (or their fixed values); mu_i starts at
    (y_i + nu)/(1 + 2 nu); beta starts at the penalized least-squares
    projection of the linked initial means onto the design columns.
    Returns (beta, eta, params) with eta = X beta.
    """
    X, y = _check_inputs(X, y)
    kappa0 = 1.0 if cfg.fix_kappa is None else float(cfg.fix_kappa)
    alpha0 = 1.0 if cfg.fix_alpha is None else float(cfg.fix_alpha)
    params = FamilyParams(kappa=kappa0, alpha=alpha0)
    mu0 = (y + cfg.nu) / (1.0 + 2.0 * cfg.nu)
    eta0 = params.link(mu0)
    p = X.shape[1]
    A = X.T @ X
    idx = np.arange(1, p)
    A[idx, idx] += cfg.lam
    beta = solve_penalized_system(A, X.T @ eta0)
    return beta, X @ beta, params


def beta_step(params: FamilyParams, beta, X, y, lam: float,
              weight_mode: str = "observed"):
    """One safeguarded Newton/IRLS update of the coefficient vector.

    Solves (X^T W X + lambda (0 (+) I)) beta_next = X^T W eta
    + X^T Diag(f'(eta)) (y - mu), where W_i = f'(eta_i)^2 b''(theta_i)
    - (y_i - mu_i) f''(eta_i) in observed mode (the negated Hessian
    diagonal) or its expectation f'^2 b'' in expected mode. Observed
    weights can be indefinite, so on a singular system or a
    non-ascending step the expected weights are tried, with up to 30
    step-halvings; if nothing ascends the input is returned unchanged.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    eta = X @ beta
    theta, mu, slope, w_obs, w_exp = _backend.kernels.irls_terms(
        params.kappa, params.alpha, np.ascontiguousarray(eta), y
    )
    ll0 = _pll_from_eta(params.kappa, params.alpha, eta, y, lam, beta)
    weights = [w_obs, w_exp] if weight_mode == "observed" else [w_exp]
    p = X.shape[1]
    idx = np.arange(1, p)
    score_part = X.T @ (slope * (y - mu))
    for w in weights:
        A = (X * w[:, None]).T @ X
        A[idx, idx] += lam
        try:
            target = solve_penalized_system(A, X.T @ (w * eta) + score_part)
        except SingularSystemError:
            continue
        direction = target - beta
        step = 1.0
        for _ in range(31):
            cand = beta + step * direction
            ll = _pll_from_eta(params.kappa, params.alpha, X @ cand, y, lam, cand)
            if ll >= ll0 - 1e-12:
                return cand
            step *= 0.5
    return beta.copy()


def _scalar_ascent(objective, value, bounds, fd_step, max_iters):
    """Maximize a smooth scalar objective within bounds, never descending.

    One safeguarded Newton update from central finite differences
    (relative step fd_step), falling back to a golden-section search
    along the sign of the score when curvature is not negative or the
    Newton candidate fails to ascend. Returns the input when the score
    magnitude is below 1e-10 or nothing better is found.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    v = min(max(float(value), lo), hi)
    f0 = objective(v)
    h = fd_step * max(1.0, abs(v))
    if hi - lo <= 2.0 * h:
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        if h <= 0.0:
            return v
    else:
        c = min(max(v, lo + h), hi - h)
    f_minus = objective(c - h)
    f_plus = objective(c + h)
    f_center = f0 if c == v else objective(c)
    score = (f_plus - f_minus) / (2.0 * h)
    if abs(score) < 1e-10:
        return v
    curvature = (f_plus - 2.0 * f_center + f_minus) / (h * h)
    if curvature < 0.0:
        cand = min(max(c - score / curvature, lo), hi)
        if cand != v and objective(cand) >= f0:
            return cand
    a, b = (v, hi) if score > 0.0 else (lo, v)
    if a == b:
        return v
    best_v, best_f = v, f0
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = objective(x1)
    f2 = objective(x2)
    for _ in range(max_iters):
        if f1 > best_f:
            best_v, best_f = x1, f1
        if f2 > best_f:
            best_v, best_f = x2, f2
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
    if f1 > best_f:
        best_v, best_f = x1, f1
    if f2 > best_f:
        best_v, best_f = x2, f2
    return best_v if best_f > f0 else v


def kappa_step(params: FamilyParams, beta, X, y, lam: float,
               cfg: FitConfig) -> float:
    """Safeguarded ascent update of the softness parameter."""
    if cfg.fix_kappa is not None:
        return float(cfg.fix_kappa)
    beta = np.asarray(beta, dtype=np.float64)
    eta = np.ascontiguousarray(np.asarray(X, dtype=np.float64) @ beta)
    y = np.ascontiguousarray(y, dtype=np.float64)
    penalty = 0.5 * lam * float(beta[1:] @ beta[1:])

    def objective(kappa):
        return _backend.kernels.loglik_from_eta(kappa, params.alpha, eta, y) - penalty

    return float(_scalar_ascent(objective, params.kappa, cfg.kappa_bounds,
                                cfg.fd_step, cfg.max_newton_iters))


def alpha_step(params: FamilyParams, beta, X, y, lam: float,
               cfg: FitConfig) -> float:
    """Safeguarded ascent update of the scaled separation parameter."""
    if cfg.fix_alpha is not None:
        return float(cfg.fix_alpha)
    beta = np.asarray(beta, dtype=np.float64)
    eta = np.ascontiguousarray(np.asarray(X, dtype=np.float64) @ beta)
    y = np.ascontiguousarray(y, dtype=np.float64)
    penalty = 0.5 * lam * float(beta[1:] @ beta[1:])

    def objective(alpha):
        return _backend.kernels.loglik_from_eta(params.kappa, alpha, eta, y) - penalty

    return float(_scalar_ascent(objective, params.alpha, cfg.alpha_bounds,
                                cfg.fd_step, cfg.max_newton_iters))


# ---------------------------------------------------------------------------
# Outer loop
# ---------------------------------------------------------------------------

def fit(X, y, cfg: FitConfig | None = None, feature_means=None,
        feature_scales=None, callback=None) -> FittedModel:
    """Fit by cyclic scoring: kappa step, alpha step, beta step per cycle.

    Stops when the relative objective change drops below cfg.tol or
    after cfg.max_outer_iters cycles; the convergence flag records
    which. callback(iteration, objective) is invoked after the initial
    point (iteration 0) and after each cycle. feature_means and
    feature_scales record the standardization applied by the caller to
    the non-intercept columns (identity transform when omitted).
    Deterministic: identical inputs give a bit-identical model.
    """
    if cfg is None:
        cfg = FitConfig()
    X, y = _check_inputs(X, y)
    beta, eta, params = initialize(X, y, cfg)
    kappa, alpha = params.kappa, params.alpha
    lam = cfg.lam
    ll = _pll_from_eta(kappa, alpha, eta, y, lam, beta)
    if callback is not None:
        callback(0, ll)
    converged = False
    n_iters = 0
    for n_iters in range(1, cfg.max_outer_iters + 1):
        params = FamilyParams(kappa=kappa, alpha=alpha)
        kappa = kappa_step(params, beta, X, y, lam, cfg)
        params = FamilyParams(kappa=kappa, alpha=alpha)
        alpha = alpha_step(params, beta, X, y, lam, cfg)
        params = FamilyParams(kappa=kappa, alpha=alpha)
        beta = beta_step(params, beta, X, y, lam, cfg.weight_mode)
        ll_new = _pll_from_eta(kappa, alpha, X @ beta, y, lam, beta)
        if callback is not None:
            callback(n_iters, ll_new)
        if abs(ll_new - ll) < cfg.tol * max(abs(ll_new), abs(ll), 1e-12):
            ll = ll_new
            converged = True
            break
        ll = ll_new
    n_features = X.shape[1] - 1
    if feature_means is None:
        feature_means = np.zeros(n_features)
    if feature_scales is None:
        feature_scales = np.ones(n_features)
    return FittedModel(
        beta0=float(beta[0]),
        beta=np.asarray(beta[1:], dtype=np.float64).copy(),
        kappa=float(kappa),
        alpha=float(alpha),
        penalized_loglik=float(ll),
        n_iters=n_iters,
        converged=converged,
        lam=float(lam),
        feature_means=np.asarray(feature_means, dtype=np.float64).copy(),
        feature_scales=np.asarray(feature_scales, dtype=np.float64).copy(),
    )
