"""scikit-learn style wrapper around :func:`expg.inference.mle_fit`."""

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_in_support, check_sample
from .inference import mle_fit


class ExpGEstimator(DensityMixin, TransformerMixin, BaseEstimator):
    """Maximum likelihood exp-G density estimator.

    Parameters
    ----------
    family : str
        Base family: ``weibull``, ``frechet`` or ``beta``.
    fix_lambda : float, optional
        Pin ``lam``; ``0`` fits the base family.
    level : float
        Confidence level of the reported intervals.
    with_covariance : bool
        Compute the information matrix and intervals after fitting.

    Attributes
    ----------
    report_ : FitReport
    model_ : ExpGModel
    lambda_ : float
    theta_ : ndarray

    Examples
    --------
    >>> from expg import ExpGModel, Weibull
    >>> from expg.estimator import ExpGEstimator
    >>> x = ExpGModel(1.0, Weibull(2.0, 1.0)).sample(500, seed=0)
    >>> est = ExpGEstimator("weibull").fit(x.reshape(-1, 1))
    >>> est.transform(x[:3].reshape(-1, 1)).shape
    (3, 1)
    """

    def __init__(self, family="weibull", fix_lambda=None, level=0.95, with_covariance=True):
        self.family = family
        self.fix_lambda = fix_lambda
        self.level = level
        self.with_covariance = with_covariance

    def fit(self, X, y=None):
        x = check_sample(X)
        self.report_ = mle_fit(self.family, x, fix_lambda=self.fix_lambda, level=self.level,
                               with_covariance=self.with_covariance)
        self.model_ = self.report_.model
        self.lambda_ = float(self.report_.estimates[0])
        self.theta_ = np.asarray(self.report_.estimates[1:])
        self.n_features_in_ = 1
        return self

    def _x(self, X):
        check_is_fitted(self, "model_")
        return check_in_support(check_sample(X), self.model_.base)

    def score_samples(self, X):
        """Log-density of each observation."""
        return np.asarray(self.model_.logpdf(self._x(X)), dtype=float)

    def score(self, X, y=None):
        """Total log-likelihood of ``X`` under the fitted model."""
        return float(np.sum(self.score_samples(X)))

    def transform(self, X):
        """Probability integral transform ``F(x)``, as a single column."""
        x = self._x(X)
        return np.asarray(self.model_.cdf(x), dtype=float).reshape(-1, 1)

    def inverse_transform(self, U):
        check_is_fitted(self, "model_")
        u = check_sample(U, "U")
        return np.asarray(self.model_.quantile(u), dtype=float).reshape(-1, 1)

    def sample(self, n_samples=1, random_state=None):
        check_is_fitted(self, "model_")
        return self.model_.sample(n_samples, seed=random_state).reshape(-1, 1)
