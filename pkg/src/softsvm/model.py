"""Prediction, classification, and per-observation diagnostics.

The variance weight V(mu_hat) of an observation measures its influence
on the fitted boundary. Points with a large weight act like soft
support vectors; points near mu_hat = 1/2 caught between the two
variance peaks form a dead zone; the remaining points with extreme
fitted means are inliers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .solver import FittedModel

__all__ = [
    "PointType",
    "PointDiagnostics",
    "predict_mu",
    "classify",
    "diagnose",
    "soft_margin",
]


class PointType(enum.Enum):
    """Influence class of an observation under a fitted model."""

    SOFT_SUPPORT_VECTOR = "sv"
    DEAD_ZONE = "dead"
    INLIER = "inlier"


@dataclass(frozen=True)
class PointDiagnostics:
    """Fitted mean, variance weight, influence type, and predicted label."""

    mu_hat: float
    variance_weight: float
    point_type: PointType
    predicted_label: int


def _standardized(model: FittedModel, features) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features.reshape(1, -1)
    if features.ndim != 2 or features.shape[1] != model.beta.shape[0]:
        raise ValueError(
            f"expected {model.beta.shape[0]} feature columns, got shape {features.shape}"
        )
    return (features - model.feature_means) / model.feature_scales


def predict_mu(model: FittedModel, features) -> np.ndarray:
    """Fitted means mu_hat = b'(f(beta0 + x^T beta)) for raw feature rows.

    The standardization recorded at fit time is applied before the
    linear predictor, so callers pass features on the original scale.
    """
    eta = model.beta0 + _standardized(model, features) @ model.beta
    return model.family.mean_from_eta(eta)


def classify(mu) -> np.ndarray:
    """Consensus labels I(mu > 1/2); an exact tie classifies as 0."""
    return (np.asarray(mu) > 0.5).astype(np.int64)


def diagnose(model: FittedModel, features, v_threshold: float = 1.0,
             mu_band: float = 0.25) -> list[PointDiagnostics]:
    """Per-observation influence diagnostics.

    A point is a soft support vector when its variance weight
    V(mu_hat) >= v_threshold; otherwise dead-zone when
    |mu_hat - 1/2| < mu_band; otherwise an inlier. The partition is
    total and exclusive.
    """
    mu = np.atleast_1d(predict_mu(model, features))
    weights = np.atleast_1d(model.family.variance_of_mean(mu))
    labels = classify(mu)
    out = []
    for m, v, lab in zip(mu, weights, labels):
        if v >= v_threshold:
            kind = PointType.SOFT_SUPPORT_VECTOR
        elif abs(m - 0.5) < mu_band:
            kind = PointType.DEAD_ZONE
        else:
            kind = PointType.INLIER
        out.append(PointDiagnostics(
            mu_hat=float(m),
            variance_weight=float(v),
            point_type=kind,
            predicted_label=int(lab),
        ))
    return out


def soft_margin(model: FittedModel) -> float:
    """M = delta / ||beta||_2 = (alpha/kappa) / ||beta||_2.

    Computed on the standardized feature scale used at fit time. A zero
    coefficient vector has no margin direction and is an error.
    """
    norm = float(np.linalg.norm(model.beta))
    if norm == 0.0:
        raise ValueError("soft margin undefined for a zero coefficient vector")
    return (model.alpha / model.kappa) / norm
