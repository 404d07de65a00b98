import math

import numpy as np
import pytest
from scipy import stats

from expg import Beta, Dataset, ExpGModel, Frechet, Weibull, fatigue
from expg.exceptions import DataError, DomainError, UnsupportedOperationError
from expg.inference import (
    fisher_info,
    hessian,
    lambda_breve,
    loglik,
    loglik_terms,
    lr_test,
    mle_fit,
    modified_profile_equation,
    modified_profile_fit,
    modified_profile_loglik,
    score,
    score_terms,
    score_test,
    wald_test,
)
from expg.quadrature import fd_gradient, fd_hessian

BASES = [Weibull(1.5, 2.0), Beta(2.0, 3.0), Frechet(3.0, 2.0)]
PRINTED_FULL = (-41.645738, 1.642486, 55.670932)


def relative_gap(a, b):
    return np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-3 * np.max(np.abs(b))))


@pytest.fixture(scope="module")
def data():
    return fatigue()


@pytest.fixture(scope="module")
def full_fit(data):
    return mle_fit("weibull", data)


@pytest.fixture(scope="module")
def base_fit(data):
    return mle_fit("weibull", data, fix_lambda=0.0)


# ----------------------------------------------------------- likelihood

def test_loglik_at_zero_is_base_loglik():
    b = Weibull(2.0, 1.5)
    x = b.ppf(np.linspace(0.05, 0.95, 40))
    assert loglik(ExpGModel(0.0, b), x) == np.sum(b.logpdf(x))


def test_loglik_at_printed_points(data):
    assert loglik(ExpGModel(0.0, Weibull(5.9790, 143.3150)), data) == pytest.approx(-459.0999, abs=1e-3)
    lam, alpha, beta = PRINTED_FULL
    assert loglik(ExpGModel(lam, Weibull(alpha, beta)), data) == pytest.approx(-454.3272, abs=1e-3)


def test_printed_exp_weibull_point_is_not_stationary(data):
    lam, alpha, beta = PRINTED_FULL
    m = ExpGModel(lam, Weibull(alpha, beta))
    g, H = score(m, data), hessian(m, data)
    # printing to 6 decimals moves the score by at most |H| @ 5e-7
    rounding = np.abs(H) @ np.full(3, 5e-7)
    assert np.all(np.abs(g) > 100 * rounding)
    assert np.linalg.eigvalsh(H).max() > 0


@pytest.mark.parametrize("lam", [-5.0, 0.0, 5.0])
@pytest.mark.parametrize("base", BASES, ids=repr)
def test_score_and_hessian_match_finite_differences(lam, base):
    m = ExpGModel(lam, base)
    x = m.sample(60, seed=5)
    p = np.array(m.params)

    def f(q):
        return loglik(m.with_params(q), x)

    g = score(m, x)
    assert relative_gap(g, fd_gradient(f, p)) <= 1e-6
    H = hessian(m, x)
    assert relative_gap(H, fd_hessian(f, p)) <= 1e-4
    np.testing.assert_allclose(score_terms(m, x).sum(axis=0), g, rtol=1e-12, atol=1e-12)


def test_score_lambda_component_at_zero():
    b = Weibull(2.0, 1.5)
    x = ExpGModel(0.0, b).sample(100, seed=9)
    g = score(ExpGModel(0.0, b), x)
    assert g[0] == np.sum(0.5 - b.cdf(x))
    np.testing.assert_allclose(g[1:], np.sum(b.score(x), axis=0), rtol=1e-14)


def test_score_has_zero_mean_under_model():
    m = ExpGModel(2.0, Weibull(1.5, 2.0))
    u = score_terms(m, m.sample(10_000, seed=21))[:, 0]
    assert abs(u.mean()) <= 3 * u.std(ddof=1) / math.sqrt(u.size)


def test_theta_score_vanishes_at_base_mle(base_fit, data):
    g = score(base_fit.model, data)
    assert np.max(np.abs(g[1:])) <= 1e-6


def test_lambda_zero_continuity():
    b = Beta(2.0, 3.0)
    x = ExpGModel(0.0, b).sample(50, seed=3)
    m0 = ExpGModel(0.0, b)
    for eps in (1e-7, -1e-7):
        m = ExpGModel(eps, b)
        assert abs(loglik(m, x) - loglik(m0, x)) <= 1e-4
        assert np.max(np.abs(score(m, x) - score(m0, x))) <= 1e-4
        assert np.max(np.abs(fisher_info(m) - fisher_info(m0))) <= 1e-4


def test_support_violation_names_index():
    with pytest.raises(DataError) as err:
        loglik(ExpGModel(1.0, Beta(2.0, 2.0)), [0.2, 0.5, 1.5])
    assert err.value.index == 2
    with pytest.raises(DataError):
        loglik_terms(ExpGModel(1.0, Weibull(1.0, 1.0)), [1.0, -2.0])


# -------------------------------------------------------- information

def test_information_examples():
    assert fisher_info(ExpGModel(0.0, Weibull(1.0, 1.0)))[0, 0] == 1 / 12
    assert fisher_info(ExpGModel(1.0, Weibull(1.0, 1.0)))[0, 0] == pytest.approx(
        1 - math.e / (math.e - 1) ** 2, rel=1e-12)
    assert fisher_info(ExpGModel(1e-4, Weibull(1.0, 1.0)))[0, 0] == pytest.approx(1 / 12, abs=1e-6)


@pytest.mark.parametrize("base", BASES, ids=repr)
def test_information_at_zero_has_base_block(base):
    K = fisher_info(ExpGModel(0.0, base))
    mc = ExpGModel(0.0, base).sample(200_000, seed=1)
    base_info = np.cov(base.score(mc).T)
    assert relative_gap(K[1:, 1:], base_info) <= 0.03
    # cross term: E[(1/2 - G) U*] computed by Monte Carlo
    cross = np.mean((0.5 - base.cdf(mc))[:, None] * base.score(mc), axis=0)
    np.testing.assert_allclose(K[0, 1:], cross, atol=0.01)
    np.testing.assert_allclose(K, K.T, atol=1e-13)


@pytest.mark.parametrize("model", [ExpGModel(1.0, Weibull(1.0, 1.0)), ExpGModel(2.0, Beta(2.0, 2.0)),
                                   ExpGModel(-3.0, Frechet(3.0, 2.0))], ids=repr)
def test_information_matches_expected_negative_hessian(model):
    # randomised quasi-Monte Carlo: plain Monte Carlo at this size leaves
    # several percent noise on the smallest entries
    u = stats.qmc.Sobol(1, scramble=True, seed=17).random_base2(17).ravel()
    x = model.quantile(u)
    emp = -hessian(model, x) / x.size
    assert relative_gap(fisher_info(model), emp) <= 0.02


def test_printed_exp_weibull_entries():
    m = ExpGModel(1.0, Weibull(2.0, 1.5))
    gen, pr = fisher_info(m), fisher_info(m, formula="closed-form")
    # lambda-lambda, alpha-alpha and lambda-beta agree
    for i, j in [(0, 0), (1, 1), (0, 2)]:
        assert pr[i, j] == pytest.approx(gen[i, j], rel=1e-8)
    # lambda-alpha has its sign flipped; beta entries differ when beta != 1
    assert pr[0, 1] == pytest.approx(-gen[0, 1], rel=1e-8)
    assert abs(pr[2, 2] - gen[2, 2]) > 0.1
    with pytest.raises(DomainError):
        fisher_info(ExpGModel(0.0, Weibull(1.0, 1.0)), formula="closed-form")


def test_printed_exp_beta_entries_are_swapped():
    m = ExpGModel(2.0, Beta(2.0, 3.0))
    gen, pr = fisher_info(m), fisher_info(m, formula="closed-form")
    np.testing.assert_allclose(pr[:2, :2], gen[:2, :2], rtol=1e-8)
    np.testing.assert_allclose(pr[0, 2], gen[0, 2], rtol=1e-8)
    assert pr[1, 2] == pytest.approx(gen[2, 2], rel=1e-8)
    assert pr[2, 2] == pytest.approx(gen[1, 2], rel=1e-8)
    assert np.linalg.eigvalsh(pr).min() < 0 < np.linalg.eigvalsh(gen).min()


def test_discrete_base_is_rejected():
    from expg import Bernoulli
    with pytest.raises(UnsupportedOperationError):
        loglik(ExpGModel(1.0, Bernoulli(0.3)), [0, 1, 1])


# ---------------------------------------------------------------- fitting

def test_weibull_fit(base_fit):
    lam, alpha, beta = base_fit.estimates
    assert lam == 0.0 and base_fit.fixed == {"lambda": 0.0}
    assert alpha == pytest.approx(5.9790, rel=5e-3) and beta == pytest.approx(143.3150, rel=5e-3)
    assert base_fit.loglik == pytest.approx(-459.0999, abs=0.05)
    assert base_fit.converged and base_fit.grad_norm <= 1e-6
    assert base_fit.std_errors[0] == 0.0 and tuple(base_fit.ci[0]) == (0.0, 0.0)


def test_free_fit_beats_printed_point(full_fit):
    assert full_fit.converged and full_fit.grad_norm <= 1e-6
    assert full_fit.loglik > -454.3272
    lam, alpha, beta = full_fit.estimates
    assert lam == pytest.approx(-10.884, abs=0.01)
    assert full_fit.loglik == pytest.approx(-452.0422, abs=1e-3)


def test_fit_report_invariants(full_fit):
    K, C = full_fit.info_matrix, full_fit.covariance
    np.testing.assert_allclose(K, K.T, atol=1e-12)
    assert np.linalg.eigvalsh(C).min() >= 0
    np.testing.assert_allclose(C @ (full_fit.n * K), np.eye(3), atol=1e-8)
    z = 1.959963984540054
    for est, se, (lo, hi) in zip(full_fit.estimates, full_fit.std_errors, full_fit.ci):
        assert lo == pytest.approx(est - z * se) and hi == pytest.approx(est + z * se)
    d = full_fit.as_dict()
    assert set(d["estimates"]) == {"lambda", "alpha", "beta"}


@pytest.mark.parametrize("family,model", [("beta", ExpGModel(-2.0, Beta(2.0, 3.0))),
                                          ("frechet", ExpGModel(1.5, Frechet(3.0, 2.0)))])
def test_fit_other_families(family, model):
    x = model.sample(2000, seed=8)
    rep = mle_fit(family, x)
    assert rep.converged and rep.grad_norm <= 1e-6
    truth = np.array(model.params)
    assert np.all(np.abs(rep.estimates - truth) <= 4 * rep.std_errors + 1e-12)


def test_fixed_theta_component():
    x = ExpGModel(1.0, Weibull(2.0, 1.0)).sample(500, seed=2)
    rep = mle_fit("weibull", x, fixed={"beta": 1.0})
    assert rep.estimates[2] == 1.0 and rep.converged
    assert rep.std_errors[2] == 0.0


def test_fit_rejects_bad_input():
    with pytest.raises(DataError):
        mle_fit("weibull", [1.0, 2.0, -1.0, 3.0])
    with pytest.raises(DataError):
        Dataset([])
    with pytest.raises(UnsupportedOperationError):
        mle_fit("bernoulli", [0, 1, 1, 0])


@pytest.mark.slow
def test_consistency_monte_carlo():
    truth = np.array([2.0, 2.0, 1.0])
    model = ExpGModel(2.0, Weibull(2.0, 1.0))
    est = np.array([mle_fit("weibull", model.sample(5000, seed=s), with_covariance=False).estimates
                    for s in range(50)])
    se = est.std(axis=0, ddof=1) / math.sqrt(len(est))
    assert np.all(np.abs(est.mean(axis=0) - truth) <= 3 * se)


# ------------------------------------------------------------------ tests

def test_lr_statistic(data, full_fit, base_fit):
    rep = lr_test("weibull", data, full=full_fit, restricted=base_fit)
    assert rep.df == 1 and rep.statistic == pytest.approx(2 * (full_fit.loglik - base_fit.loglik))
    assert rep.statistic == pytest.approx(14.1154, abs=1e-3)
    assert rep.p_value == pytest.approx(stats.chi2.sf(rep.statistic, 1), rel=1e-12)


def test_printed_lr_value_from_printed_logliks():
    assert 2 * (-454.3272 + 459.0999) == pytest.approx(9.5454, abs=1e-4)


def test_wald_and_score(data, full_fit, base_fit):
    w = wald_test("weibull", data, full=full_fit)
    s = score_test("weibull", data, restricted=base_fit)
    assert w.statistic == pytest.approx(full_fit.estimates[0] ** 2 / full_fit.covariance[0, 0], rel=1e-10)
    assert w.p_value < 0.05
    # the score statistic is smaller here and does not reject at 5%
    assert 1 < s.statistic < 14 and s.p_value > 0.05


def test_lr_invariant_under_reordering():
    x = ExpGModel(1.0, Weibull(2.0, 1.0)).sample(200, seed=4)
    perm = np.random.default_rng(0).permutation(x.size)
    a = lr_test("weibull", x)
    b = lr_test("weibull", x[perm])
    assert a.statistic == pytest.approx(b.statistic, abs=1e-8)


def test_general_null():
    x = ExpGModel(1.0, Weibull(2.0, 1.0)).sample(400, seed=6)
    null = {"lambda": 1.0, "alpha": 2.0}
    for test in (lr_test, wald_test, score_test):
        rep = test("weibull", x, null)
        assert rep.df == 2 and 0 <= rep.p_value <= 1
        assert rep.null == null


# ------------------------------------------------------- modified profile

def test_modified_profile_equation_is_its_gradient():
    b = Weibull(2.0, 1.5)
    x = ExpGModel(0.5, b).sample(200, seed=12)
    for pooled in (False, True):
        V = modified_profile_equation(b, x, pooled=pooled)
        fd = fd_gradient(lambda t: modified_profile_loglik(b.with_theta(t), x, pooled=pooled),
                         np.array(b.theta))
        assert relative_gap(V, fd) <= 1e-5


def test_printed_variant_differs_from_exact():
    b = Weibull(2.0, 1.5)
    x = ExpGModel(0.5, b).sample(200, seed=12)
    lam_e, d_e = lambda_breve(b, x)
    lam_p, d_p = lambda_breve(b, x, variant="printed")
    np.testing.assert_array_equal(lam_e, lam_p)
    assert not np.allclose(d_e, d_p)


def test_pooled_profile_recovers_the_mle():
    x = ExpGModel(0.0, Weibull(2.0, 1.5)).sample(300, seed=1)
    rep = modified_profile_fit("weibull", x, pooled=True)
    full = mle_fit("weibull", x, with_covariance=True)
    assert rep.converged
    np.testing.assert_allclose(rep.estimates, full.estimates[1:], rtol=1e-8)
    base = mle_fit("weibull", x, fix_lambda=0.0)
    assert np.all(np.abs(rep.estimates - base.estimates[1:]) <= 2 * full.std_errors[1:])


def test_per_observation_profile_reports_failure_honestly(data):
    rep = modified_profile_fit("weibull", data)
    assert not rep.converged and "no root" in rep.message
    assert "mle_theta" in rep.starts[-1]


def test_no_added_observation_reproduces_the_weibull_fit(data):
    # a 101st value would move the Weibull maximum by about log f(x) ~ -4,
    # so the printed Weibull fit belongs to the 100 listed values
    gaps = [abs(mle_fit("weibull", np.append(data.values, v), fix_lambda=0.0,
                        with_covariance=False).loglik + 459.0999) for v in range(50, 261, 5)]
    assert min(gaps) > 4.0
