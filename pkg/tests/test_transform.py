import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expg.exceptions import DomainError
from expg.transform import (
    log_rate_constant,
    rate_constant,
    texp_cdf,
    texp_information,
    texp_mean,
    texp_pdf,
    texp_quantile,
)

LAMS = [-50, -5, -1, -1e-6, 0, 1e-6, 1, 5, 50]
U = np.linspace(0.001, 0.999, 199)


def mp_cdf(lam, x):
    lam, x = mpmath.mpf(lam), mpmath.mpf(x)
    return -mpmath.expm1(-lam * x) / -mpmath.expm1(-lam)


def test_cdf_examples():
    assert texp_cdf(0.0, 0.3) == 0.3
    assert texp_cdf(1.0, 0.5) == pytest.approx(0.6224593312, rel=1e-9)
    assert texp_cdf(-3.0, 1.0) == 1.0
    assert texp_cdf(7.0, 0.0) == 0.0


def test_cdf_matches_mpmath():
    for lam in [-700, -40, -2, -1e-3, 1e-3, 2, 40, 700]:
        for x in [0.01, 0.2, 0.5, 0.9, 0.999]:
            assert texp_cdf(lam, x) == pytest.approx(float(mp_cdf(lam, x)), rel=1e-12, abs=1e-300)


def test_quantile_examples():
    assert texp_quantile(0.0, 0.8) == 0.8
    assert texp_quantile(1.0, 0.6224593312) == pytest.approx(0.5, abs=1e-9)
    assert texp_quantile(-3.0, 0.0) == 0.0


@pytest.mark.parametrize("lam", LAMS)
def test_round_trip(lam):
    back = texp_cdf(lam, texp_quantile(lam, U))
    assert np.max(np.abs(back - U)) <= 1e-12


@pytest.mark.parametrize("lam", [1e-9, -1e-9])
def test_continuity_at_zero(lam):
    x = np.linspace(0, 1, 101)
    assert np.max(np.abs(texp_cdf(lam, x) - x)) <= 1e-8


@settings(max_examples=200, deadline=None)
@given(st.floats(-200, 200), st.floats(0, 1), st.floats(0, 1))
def test_cdf_monotone(lam, x1, x2):
    x1, x2 = sorted((x1, x2))
    assert texp_cdf(lam, x1) <= texp_cdf(lam, x2)


def test_rate_constant_examples():
    assert rate_constant(0.0) == 1.0
    assert rate_constant(1.0) == pytest.approx(1.5819767068693265, rel=1e-14)
    assert rate_constant(1e-8) == pytest.approx(1 + 5e-9, rel=1e-15)


@pytest.mark.parametrize("lam", [-800, -20, -1e-6, 1e-6, 0.3, 20, 800])
def test_rate_constant_positive_and_log_consistent(lam):
    ref = mpmath.mpf(lam) / -mpmath.expm1(-mpmath.mpf(lam))
    assert log_rate_constant(lam) == pytest.approx(float(mpmath.log(ref)), rel=1e-13, abs=1e-15)
    if abs(lam) < 700:
        assert rate_constant(lam) > 0


@pytest.mark.parametrize("lam", [-10, -1, 1e-7, 0.5, 10])
def test_density_normalization(lam):
    mass = mpmath.quad(lambda x: mpmath.exp(-lam * x), [0, 1])
    assert rate_constant(lam) * float(mass) == pytest.approx(1.0, abs=1e-12)


def test_pdf_is_derivative_of_cdf():
    x = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    for lam in [-4, 0, 2.5]:
        fd = (texp_cdf(lam, x + h) - texp_cdf(lam, x - h)) / (2 * h)
        np.testing.assert_allclose(texp_pdf(lam, x), fd, rtol=1e-8)


@pytest.mark.parametrize("lam", [-30, -1, -0.01, 1e-4, 0.04, 0.06, 2, 30])
def test_mean_and_information(lam):
    mp = mpmath.mpf(lam)
    k = mp / -mpmath.expm1(-mp)
    mean = mpmath.quad(lambda x: x * k * mpmath.exp(-mp * x), [0, 1])
    second = mpmath.quad(lambda x: x**2 * k * mpmath.exp(-mp * x), [0, 1])
    assert texp_mean(lam) == pytest.approx(float(mean), rel=1e-11)
    assert texp_information(lam) == pytest.approx(float(second - mean**2), rel=1e-9)


def test_lambda_zero_values():
    assert texp_mean(0.0) == 0.5
    assert texp_information(0.0) == 1 / 12


def test_rejects_out_of_range():
    with pytest.raises(DomainError):
        texp_cdf(1.0, 1.1)
    with pytest.raises(DomainError):
        texp_quantile(1.0, -0.01)
    assert texp_cdf(1.0, 1 + 1e-13) == 1.0
    with pytest.raises(Exception):
        texp_cdf(math.nan, 0.5)
