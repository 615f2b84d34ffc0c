"""Soft-SVM regression.

A generalized linear model on an exponential family that bridges
logistic regression and the support vector machine: a softness
parameter kappa controls how closely the cumulant approximates the
hinge-loss normalizer, and a scaled separation alpha = kappa * delta
sets the margin width. The package provides the family functions in
closed, numerically stable form, the cyclic-scoring fitter, prediction
and influence diagnostics, MCC-based cross-validation, a planar mixture
simulator with a factorial benchmark, and a CLI over all of it.
"""

from ._backend import backend_name
from .data import (
    BenchRow,
    DataError,
    Dataset,
    SimSpec,
    Standardization,
    design_matrix,
    load_csv,
    run_factorial,
    simulate_mixture,
    standardize,
)
from .evaluation import (
    ConfusionMatrix,
    CvReport,
    confusion,
    cross_validate,
    evaluate,
    kfold_split,
    mcc,
)
from .family import (
    FamilyParams,
    hinge_cumulant,
    scaled_inverse_mean,
    variance_shape,
)
from .model import (
    PointDiagnostics,
    PointType,
    classify,
    diagnose,
    predict_mu,
    soft_margin,
)
from .solver import (
    FitConfig,
    FittedModel,
    SingularSystemError,
    fit,
    penalized_loglik,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    "BenchRow",
    "ConfusionMatrix",
    "CvReport",
    "DataError",
    "Dataset",
    "FamilyParams",
    "FitConfig",
    "FittedModel",
    "PointDiagnostics",
    "PointType",
    "SimSpec",
    "SingularSystemError",
    "Standardization",
    "classify",
    "confusion",
    "cross_validate",
    "design_matrix",
    "diagnose",
    "evaluate",
    "fit",
    "hinge_cumulant",
    "kfold_split",
    "load_csv",
    "mcc",
    "penalized_loglik",
    "predict_mu",
    "run_factorial",
    "scaled_inverse_mean",
    "simulate_mixture",
    "soft_margin",
    "standardize",
    "variance_shape",
]
