import math

import numpy as np
import pytest
from scipy import integrate, stats

from expg import Bernoulli, Beta, ExpGModel, Frechet, Weibull, reciprocal_model
from expg.exceptions import DomainError, ParameterError, UnsupportedOperationError
from expg.transform import texp_cdf

BASES = [Weibull(1.0, 1.0), Weibull(2.0, 1.5), Frechet(3.0, 2.0), Beta(2.0, 3.0), Beta(0.7, 1.0)]
LAMS = [-10.0, -1.0, 0.0, 1e-7, 1.0, 10.0]
GRID = [(lam, b) for lam in LAMS for b in BASES]
GRID_IDS = [f"{lam}-{b!r}" for lam, b in GRID]


def test_cdf_examples():
    w = Weibull(1.0, 1.0)
    assert ExpGModel(0.0, w).cdf(0.7) == w.cdf(0.7)
    m = ExpGModel(1.0, w)
    assert m.cdf(1.0) == pytest.approx(texp_cdf(1.0, 1 - math.exp(-1)), rel=1e-14)
    # 0.7412 by direct composition; quadrature of the density agrees
    mass, _ = integrate.quad(m.pdf, 0, 1, epsabs=1e-14)
    assert m.cdf(1.0) == pytest.approx(mass, rel=1e-12)
    assert m.cdf(-1.0) == 0.0
    assert ExpGModel(2.0, Beta(2.0, 2.0)).cdf(-0.5) == 0.0


def test_pdf_examples():
    w = Weibull(1.0, 1.0)
    x = np.linspace(0.1, 4, 9)
    np.testing.assert_array_equal(ExpGModel(0.0, w).pdf(x), w.pdf(x))
    m = ExpGModel(1.0, w)
    expected = 1.5819767068693265 * math.exp(-1) * math.exp(-(1 - math.exp(-1)))
    assert m.pdf(1.0) == pytest.approx(expected, rel=1e-13)
    h = 1e-6
    assert m.pdf(1.0) == pytest.approx((m.cdf(1 + h) - m.cdf(1 - h)) / (2 * h), rel=1e-8)


@pytest.mark.parametrize("lam,base", GRID, ids=GRID_IDS)
def test_pdf_integrates_to_one(lam, base):
    m = ExpGModel(lam, base)
    lo, hi = base.support
    mass, _ = integrate.quad(m.pdf, lo, hi, epsabs=1e-12, limit=400)
    assert mass == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("lam,base", GRID, ids=GRID_IDS)
def test_logpdf_and_quantile(lam, base):
    m = ExpGModel(lam, base)
    u = np.linspace(0.01, 0.99, 51)
    x = m.quantile(u)
    np.testing.assert_allclose(m.cdf(x), u, atol=1e-9)
    np.testing.assert_allclose(m.sf(m.isf(u)), u, atol=1e-9)
    np.testing.assert_allclose(np.exp(m.logpdf(x)), m.pdf(x), rtol=1e-12)


@pytest.mark.parametrize("lam,base", GRID, ids=GRID_IDS)
def test_same_support(lam, base):
    m = ExpGModel(lam, base)
    lo, hi = base.support
    x = np.concatenate([np.linspace(-2, 0, 5), base.ppf(np.linspace(0.01, 0.99, 20)), [5.0]])
    assert np.array_equal(m.pdf(x) > 0, base.pdf(x) > 0)


def test_hazard():
    m = ExpGModel(1.0, Weibull(1.0, 1.0))
    w = m.base
    closed = 1.0 * w.pdf(1.0) / (1 - math.exp(-1.0 * w.sf(1.0)))
    assert m.hazard(1.0) == pytest.approx(closed, rel=1e-12)
    assert m.hazard(1.0) == pytest.approx(m.pdf(1.0) / m.sf(1.0), rel=1e-12)
    x = np.linspace(0.1, 5, 20)
    np.testing.assert_allclose(ExpGModel(0.0, Weibull(1.0, 2.5)).hazard(x), 0.4, rtol=1e-12)
    np.testing.assert_allclose(ExpGModel(1e-9, w).hazard(x), w.pdf(x) / w.sf(x), rtol=1e-8)


def test_hazard_where_survival_vanishes():
    with pytest.raises(DomainError):
        ExpGModel(1.0, Beta(2.0, 1.0)).hazard(1.0)
    with pytest.raises(DomainError):
        ExpGModel(1.0, Weibull(1.0, 1.0)).hazard(np.inf)


def test_quantile_examples():
    w = Weibull(2.0, 1.5)
    u = np.linspace(0.05, 0.95, 7)
    np.testing.assert_array_equal(ExpGModel(0.0, w).quantile(u), w.ppf(u))
    m = ExpGModel(1.0, Weibull(1.0, 1.0))
    assert m.cdf(m.quantile(0.5)) == pytest.approx(0.5, abs=1e-12)
    assert ExpGModel(3.0, Beta(2.0, 2.0)).quantile(1 - 1e-15) == pytest.approx(1.0, abs=1e-6)


def test_sampling():
    w = Weibull(2.0, 1.5)
    x = ExpGModel(0.0, w).sample(10_000, seed=1)
    assert stats.kstest(x, w.cdf).pvalue > 0.01
    np.testing.assert_array_equal(ExpGModel(1.0, w).sample(50, seed=7), ExpGModel(1.0, w).sample(50, seed=7))
    hi = np.quantile(ExpGModel(50.0, w).sample(10_000, seed=2), 0.99)
    med = np.quantile(ExpGModel(0.0, w).sample(10_000, seed=3), 0.5)
    assert hi < med
    m = ExpGModel(-3.0, Beta(2.0, 3.0))
    assert stats.kstest(m.sample(10_000, seed=4), m.cdf).pvalue > 0.01


def test_concentration():
    q = [ExpGModel(lam, Weibull(1.5, 1.0)).quantile(0.99) for lam in (1, 10, 50, 200)]
    assert all(a > b for a, b in zip(q, q[1:])) and q[-1] < 0.1
    q = [ExpGModel(-lam, Beta(2.0, 1.0)).quantile(0.01) for lam in (1, 10, 50, 200)]
    assert all(a < b for a, b in zip(q, q[1:])) and q[-1] > 0.98


@pytest.mark.parametrize("base", [Weibull(1.5, 2.0), Beta(2.0, 3.0)], ids=repr)
@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("r", [1, 2])
def test_moment_domination(base, lam, r):
    # f_lam = k g exp(-lam G) with exp(-lam G) <= 1 for lam > 0 and >= 1 for lam < 0
    lo, hi = base.support

    def mom(model):
        return integrate.quad(lambda v: abs(v) ** r * model.pdf(v), lo, hi, epsabs=1e-13, limit=200)[0]

    k = lam / -math.expm1(-lam)
    assert mom(ExpGModel(lam, base)) <= k * base.moment(r) * (1 + 1e-12)
    k_neg = -lam / -math.expm1(lam)
    assert k_neg * base.moment(r) <= mom(ExpGModel(-lam, base)) * (1 + 1e-12)


def test_moment_bound_constant_side():
    # with the constant on the other side the lam > 0 bound fails
    base, lam = Beta(2.0, 3.0), 10.0
    m2 = integrate.quad(lambda v: v**2 * ExpGModel(lam, base).pdf(v), 0, 1, epsabs=1e-14)[0]
    assert base.moment(2) < lam / -math.expm1(-lam) * m2


def test_uniform_convergence():
    for base in (Weibull(2.0, 1.5), Beta(2.0, 3.0), Frechet(3.0, 2.0)):
        x = base.ppf(np.linspace(1e-4, 1 - 1e-4, 2001))
        assert np.max(np.abs(ExpGModel(1e-6, base).cdf(x) - base.cdf(x))) <= 1e-5


def test_reciprocal_property():
    m = ExpGModel(1.5, Weibull(2.0, 3.0))
    r = reciprocal_model(m)
    assert isinstance(r.base, Frechet) and r.lam == -1.5
    assert r.base.beta == pytest.approx(1 / 3.0) and r.base.alpha == 2.0
    x = np.linspace(0.05, 3, 60)
    direct = texp_cdf(-1.5, m.base.sf(1 / x))
    np.testing.assert_allclose(r.cdf(x), direct, atol=1e-12)
    np.testing.assert_allclose(m.sf(1 / x), r.cdf(x), atol=1e-12)
    y = 1 / m.sample(10_000, seed=11)
    assert stats.kstest(y, r.cdf).pvalue > 0.01


def test_pmf():
    d = ExpGModel(1.0, Bernoulli(0.5))
    p0, p1 = d.pmf(np.array([0, 1]))
    assert p0 == pytest.approx((1 - math.exp(-0.5)) / (1 - math.exp(-1)), rel=1e-13)
    assert p0 + p1 == pytest.approx(1.0, abs=1e-15)
    assert ExpGModel(1e-9, Bernoulli(0.3)).pmf(1) == pytest.approx(0.3, abs=1e-8)
    assert ExpGModel(0.0, Bernoulli(0.3)).pmf(1) == pytest.approx(0.3, abs=1e-15)
    with pytest.raises(UnsupportedOperationError):
        ExpGModel(1.0, Weibull(1.0, 1.0)).pmf(1.0)
    with pytest.raises(UnsupportedOperationError):
        d.pdf(0.5)


def test_invalid_model():
    with pytest.raises(ParameterError):
        ExpGModel(math.inf, Weibull(1.0, 1.0))
    with pytest.raises(ParameterError):
        ExpGModel(1.0, "weibull")


def test_params_round_trip():
    m = ExpGModel.from_params("weibull", (2.0, 1.5, 3.0))
    assert m.lam == 2.0 and m.base == Weibull(1.5, 3.0)
    assert m.param_names == ("lambda", "alpha", "beta")
    assert m.with_params(m.params) == m
