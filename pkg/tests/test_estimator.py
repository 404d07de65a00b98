import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from expg import Beta, DataError, ExpGModel, Weibull
from expg.estimator import ExpGEstimator
from expg.inference import loglik


@pytest.fixture(scope="module")
def sample():
    return ExpGModel(1.0, Weibull(2.0, 1.0)).sample(800, seed=0).reshape(-1, 1)


@pytest.fixture(scope="module")
def fitted(sample):
    return ExpGEstimator("weibull").fit(sample)


def test_params_and_clone():
    est = ExpGEstimator("beta", fix_lambda=0.0, level=0.9)
    assert est.get_params() == {"family": "beta", "fix_lambda": 0.0, "level": 0.9, "with_covariance": True}
    other = clone(est).set_params(level=0.8)
    assert other.level == 0.8 and est.level == 0.9


def test_fit_attributes(fitted, sample):
    assert fitted.n_features_in_ == 1
    assert fitted.lambda_ == fitted.report_.estimates[0]
    np.testing.assert_array_equal(fitted.theta_, fitted.report_.estimates[1:])
    assert fitted.report_.converged


def test_score_is_total_loglik(fitted, sample):
    assert fitted.score(sample) == pytest.approx(loglik(fitted.model_, sample.ravel()), rel=1e-12)
    assert fitted.score(sample) == pytest.approx(fitted.report_.loglik, rel=1e-10)
    assert fitted.score_samples(sample).shape == (sample.shape[0],)


def test_transform_round_trip(fitted, sample):
    u = fitted.transform(sample)
    assert u.shape == sample.shape and np.all((u > 0) & (u < 1))
    np.testing.assert_allclose(fitted.inverse_transform(u), sample, rtol=1e-9)


def test_sample_is_seeded(fitted):
    a = fitted.sample(20, random_state=3)
    assert a.shape == (20, 1)
    np.testing.assert_array_equal(a, fitted.sample(20, random_state=3))


def test_accepts_one_dimensional_input():
    x = ExpGModel(-2.0, Beta(2.0, 3.0)).sample(500, seed=1)
    est = ExpGEstimator("beta").fit(x)
    assert est.report_.converged and est.transform(x).shape == (500, 1)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ExpGEstimator().transform(np.ones((3, 1)))


def test_rejects_data_outside_support(fitted):
    with pytest.raises(DataError):
        fitted.score_samples(np.array([[1.0], [-1.0]]))
    with pytest.raises(DataError):
        ExpGEstimator().fit(np.array([[1.0, 2.0], [3.0, 4.0]]))


def test_in_pipeline(sample):
    pipe = make_pipeline(FunctionTransformer(lambda v: v * 10.0), ExpGEstimator("weibull", with_covariance=False))
    pipe.fit(sample)
    assert pipe[-1].theta_[1] == pytest.approx(10 * ExpGEstimator("weibull").fit(sample).theta_[1], rel=1e-5)
