"""The Soft-SVM exponential family.

A two-parameter family of distributions on {0, 1} whose cumulant is a pair
of soft-plus shoulders,

    b(theta) = (1/2) [p_kappa(theta + 2 delta) + p_kappa(theta - 2 delta)],

with softness kappa > 0 and separation delta >= 0. At (kappa, delta) =
(1, 0) this is exactly the Bernoulli/logistic family; as kappa -> inf with
delta = 1 the cumulant converges to the hinge-loss normalizer, so ridge
fits converge to the SVM. The family is parameterized internally by
(kappa, alpha) with scaled separation alpha = kappa * delta, since every
closed form below depends on delta only through that product.

The canonical map from linear predictor to natural parameter is

    theta = f(eta) = p_kappa(eta + delta) - p_kappa(delta - eta),

odd and strictly increasing, reducing to the identity in the logistic
case and to (1 + eta)_+ - (1 - eta)_+ in the SVM limit. The link is the
composition g = f^{-1} o [b']^{-1}, both inverses available in closed
form via asinh of an exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import elementwise

__all__ = [
    "MU_EPS",
    "FamilyParams",
    "hinge_cumulant",
    "variance_shape",
    "scaled_inverse_mean",
]

#: Fitted means are clamped into [MU_EPS, 1 - MU_EPS] before inversion so
#: the link stays finite when large |eta| saturates the mean.
MU_EPS = 1e-12


def _clamp_mu(mu):
    """Validate mu in [0, 1] and clamp into the open interval."""
    arr = np.asarray(mu, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise ValueError("mean values must lie in [0, 1]")
    return np.clip(arr, MU_EPS, 1.0 - MU_EPS)


@dataclass(frozen=True)
class FamilyParams:
    """Softness kappa > 0 and scaled separation alpha = kappa*delta >= 0."""

    kappa: float
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")

    @property
    def delta(self) -> float:
        """Separation delta = alpha / kappa (derived, never stored)."""
        return self.alpha / self.kappa

    # -- cumulant and its derivatives ------------------------------------

    def cumulant(self, theta):
        """b(theta), convex, satisfying b(theta) = theta + b(-theta)."""
        return elementwise("cumulant", self.kappa, self.alpha, theta)

    def mean(self, theta):
        """b'(theta) = (1/2)[expit(k theta + 2 alpha) + expit(k theta - 2 alpha)].

        Strictly increasing, mean(0) = 1/2, mean(-theta) = 1 - mean(theta).
        """
        return elementwise("mean", self.kappa, self.alpha, theta)

    def variance_at_theta(self, theta):
        """b''(theta) = (kappa/2)[v(k theta + 2 alpha) + v(k theta - 2 alpha)].

        Positive and even in theta; v is the Bernoulli variance.
        """
        return elementwise("variance_at_theta", self.kappa, self.alpha, theta)

    # -- canonical map f and its derivatives ------------------------------

    def theta_from_eta(self, eta):
        """f(eta) = p_kappa(eta + delta) - p_kappa(delta - eta).

        Odd, strictly increasing; the identity at (kappa, alpha) = (1, 0).
        """
        return elementwise("theta_from_eta", self.kappa, self.alpha, eta)

    def dtheta_deta(self, eta):
        """f'(eta) = expit(k eta + alpha) + expit(alpha - k eta) > 0."""
        return elementwise("dtheta_deta", self.kappa, self.alpha, eta)

    def d2theta_deta2(self, eta):
        """f''(eta) = kappa [v(k eta + alpha) - v(alpha - k eta)], odd."""
        return elementwise("d2theta_deta2", self.kappa, self.alpha, eta)

    # -- inverses and the link --------------------------------------------

    def inverse_mean(self, mu):
        """[b']^{-1}(mu), the exact functional inverse of mean.

        Closed form (1/kappa)[logit(mu)/2 + sign(mu - 1/2) asinh(e^h)]
        with h = log cosh(2 alpha) + log(|mu - 1/2| / sqrt(mu(1 - mu))).
        The sign factor makes it odd about mu = 1/2; the value at exactly
        1/2 is 0 by continuity (h -> -inf there). Inputs are clamped into
        [MU_EPS, 1 - MU_EPS]; values outside [0, 1] are a domain error.
        """
        mu = _clamp_mu(mu)
        return elementwise("inverse_mean", self.kappa, self.alpha, mu)

    def eta_from_theta(self, theta):
        """f^{-1}(theta) = theta/2 + sign(theta) asinh(e^H) / kappa.

        H = -alpha + log sinh(kappa |theta| / 2); the value at theta = 0
        is 0 by continuity. Exact inverse of theta_from_eta.
        """
        return elementwise("eta_from_theta", self.kappa, self.alpha, theta)

    def link(self, mu):
        """g(mu) = f^{-1}([b']^{-1}(mu)), mean to linear predictor."""
        return elementwise(
            "eta_from_theta", self.kappa, self.alpha, self.inverse_mean(mu)
        )

    def mean_from_eta(self, eta):
        """mu(eta) = b'(f(eta)), the model's mean at linear predictor eta."""
        return elementwise(
            "mean", self.kappa, self.alpha, self.theta_from_eta(eta)
        )

    def variance_of_mean(self, mu):
        """V(mu) = b''([b']^{-1}(mu)) = kappa * r_alpha(mu).

        The variance expressed as a function of the mean; symmetric about
        mu = 1/2. Its shape r_alpha is kappa-free, see variance_shape.
        """
        return elementwise(
            "variance_at_theta", self.kappa, self.alpha, self.inverse_mean(mu)
        )

    # -- likelihood --------------------------------------------------------

    def log_likelihood(self, thetas, y) -> float:
        """Sum of y_i theta_i - b(theta_i) over observations."""
        thetas = np.asarray(thetas, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if thetas.shape != y.shape:
            raise ValueError(
                f"length mismatch: {thetas.shape} thetas vs {y.shape} labels"
            )
        if thetas.size == 0:
            return 0.0
        b = elementwise("cumulant", self.kappa, self.alpha, thetas)
        return float(np.sum(y * thetas - b))


def hinge_cumulant(theta):
    """s(theta) = (1/2)[(theta + 2)_+ + (theta - 2)_+], the SVM limit.

    Pointwise limit of the cumulant as kappa -> inf at delta = 1, with
    |b(theta) - s(theta)| <= log(2)/kappa. Used as a limit oracle only.
    """
    arr = np.asarray(theta, dtype=np.float64)
    out = 0.5 * (np.maximum(arr + 2.0, 0.0) + np.maximum(arr - 2.0, 0.0))
    if arr.ndim == 0:
        return float(out)
    return out


def scaled_inverse_mean(alpha, mu):
    """u_alpha(mu) = logit(mu)/2 + sign(mu - 1/2) asinh(e^{h_alpha(mu)}).

    The kappa-free part of the inverse mean: [b']^{-1}(mu) = u_alpha(mu)/kappa.
    """
    return FamilyParams(kappa=1.0, alpha=float(alpha)).inverse_mean(mu)


def variance_shape(alpha, mu):
    """r_alpha(mu) = (1/2)[v(u_alpha + 2 alpha) + v(u_alpha - 2 alpha)].

    The kappa-free variance shape: V_{kappa,alpha}(mu) = kappa * r_alpha(mu).
    Bimodal in mu once alpha exceeds a critical value near 0.66.
    """
    return FamilyParams(kappa=1.0, alpha=float(alpha)).variance_of_mean(mu)
