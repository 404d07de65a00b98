"""exp-G distributions: a one-parameter extension of any base distribution
through the truncated-exponential cdf, with moments, entropy and likelihood
inference."""

from .base import Bernoulli, Beta, Frechet, Weibull, make_base
from .datasets import Dataset, fatigue, load_csv
from .estimator import ExpGEstimator
from .exceptions import (
    DataError,
    DomainError,
    ExpGError,
    FitError,
    NonexistentMomentError,
    ParameterError,
    QuadratureError,
    TruncationError,
    UnsupportedOperationError,
)
from .inference import (
    FitReport,
    TestReport,
    fisher_info,
    loglik,
    lr_test,
    mle_fit,
    modified_profile_fit,
    score,
    score_test,
    wald_test,
)
from .model import ExpGModel, reciprocal_model

__version__ = "0.1.0"

__all__ = [
    "Bernoulli", "Beta", "DataError", "Dataset", "DomainError", "ExpGError", "ExpGEstimator", "ExpGModel",
    "FitError", "FitReport", "Frechet", "NonexistentMomentError", "ParameterError",
    "QuadratureError", "TestReport", "TruncationError", "UnsupportedOperationError", "Weibull",
    "fatigue", "fisher_info", "load_csv", "loglik", "lr_test", "make_base", "mle_fit",
    "modified_profile_fit", "reciprocal_model", "score", "score_test", "wald_test",
]
