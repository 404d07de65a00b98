"""Moments and order statistics of exp-G distributions.

Several routes compute the same quantities:

* ``pwm``: the series ``rate(lam) sum_j (-lam)^j / j! E{Y^r G(Y)^j}`` in
  probability weighted moments of the base, each found by quadrature;
* ``powerseries``: the double series in ordinary base moments, for bases
  whose cdf is a power series (the beta family);
* ``closed-form``: the exp-Weibull and exp-Frechet moment series;
* ``quadrature``: direct integration of the quantile function, used as the
  reference and as the fallback when a series would lose too many digits.

Every result records the route taken, so fallbacks are never silent.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special

from .base import Beta, Frechet, Weibull
from .exceptions import NonexistentMomentError, ParameterError, TruncationError
from .model import ExpGModel
from .powerseries import TruncationPolicy, power_recurrence
from .quadrature import integrate, integrate_vec, quantile_integral
from .transform import log_rate_constant, rate_constant

#: Beyond this |lam| the pwm and powerseries routes give way to quadrature.
SERIES_LAMBDA_LIMIT = 30.0
#: ``moment(route="auto")`` accepts a series result only below this error estimate.
AUTO_ROUTE_TOL = 1e-8

_EPS = np.finfo(float).eps
_DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class MomentResult:
    """A moment value with the provenance of its computation.

    ``achieved_tol`` is an estimate of the relative error: the truncation
    remainder for series, the reported quadrature error otherwise.
    """

    value: float
    route: str
    terms: int
    achieved_tol: float
    converged: bool = True

    def __float__(self):
        return float(self.value)


def _check_order(r):
    r = float(r)
    if not math.isfinite(r):
        raise ParameterError(f"moment order must be finite, got {r}")
    return r


# ---------------------------------------------------------------- quadrature


def _check_base_moment(model, r):
    """Raise early for moments that diverge."""
    b = model.base
    if isinstance(b, Frechet) and r >= b.alpha:
        raise NonexistentMomentError(
            f"E(X^{r:g}) diverges for the exp-Frechet family (requires r < alpha={b.alpha:g})"
        )
    if isinstance(b, Weibull) and r <= -b.alpha:
        raise NonexistentMomentError(f"E(X^{r:g}) diverges (requires r > -alpha)")
    if isinstance(b, Beta) and r <= -b.a:
        raise NonexistentMomentError(f"E(X^{r:g}) diverges (requires r > -a)")


def moment_quadrature(model, r, tol=1e-13):
    """``E(X^r)`` as the integral of the r-th power of the quantile function."""
    r = _check_order(r)
    _check_base_moment(model, r)
    if model.base.discrete:
        pts = np.asarray(model.base.support_points)
        probs = np.asarray(model.pmf(pts))
        with np.errstate(divide="ignore"):
            value = float(np.sum(np.where(probs > 0, np.power(pts, r), 0.0) * probs))
        return MomentResult(value, "exact-sum", pts.size, 0.0, True)
    value, err, nev, ok = quantile_integral(model, lambda x: x**r, tol=tol)
    rel = err / abs(value) if value else err
    return MomentResult(value, "quadrature", nev, rel, ok)


# ---------------------------------------------------------------- pwm series


def moment_pwm_series(model, r, policy=_DEFAULT_POLICY):
    """``E(X^r)`` from the series in probability weighted moments of the base.

    All terms ``(-lam)^j / j! E{Y^r G(Y)^j}`` are integrated together on
    one adaptive mesh, with error control relative to the largest term.
    Summation stops at the first ``j >= |lam|`` whose term falls below
    ``policy.rel_tol`` times the running total. The digits lost to
    alternating signs (``lam > 0``) are estimated from
    ``sum|term| / |total|`` and folded into ``achieved_tol``.

    Raises
    ------
    TruncationError
        When ``policy.max_terms`` terms do not reach the tolerance.
    """
    r = _check_order(r)
    _check_base_moment(model, r)
    lam, base = model.lam, model.base
    J = min(policy.max_terms, int(math.e * abs(lam)) + 60)
    j = np.arange(J)
    log_coef = j * math.log(abs(lam)) - special.gammaln(j + 1.0) if lam else np.where(j == 0, 0.0, -np.inf)
    coef = np.exp(log_coef) * np.where((j % 2 == 1) & (lam > 0), -1.0, 1.0)

    def lower(v):
        return coef * v**j * base.ppf(v) ** r

    def upper(s):
        return coef * (1.0 - s) ** j * base.isf(s) ** r

    lo = integrate_vec(lower, (0.0, 0.5), tol=0.0, rel_tol=1e-12)
    hi = integrate_vec(upper, (0.0, 0.5), tol=0.0, rel_tol=1e-12)
    terms = lo.value + hi.value
    partial = np.cumsum(terms)
    done = (j >= abs(lam)) & (np.abs(terms) <= policy.rel_tol * np.abs(partial))
    if not done.any():
        raise TruncationError(
            f"pwm series did not converge in {J} terms",
            partial=rate_constant(lam) * partial[-1],
            terms=J,
        )
    stop = int(np.argmax(done))
    total = float(partial[stop])
    abs_total = float(np.sum(np.abs(terms[: stop + 1])))
    quad_err = (stop + 1) * (lo.abs_error_estimate + hi.abs_error_estimate)
    rel = float(max(abs(terms[stop]), quad_err, abs_total * 1e-14) / abs(total)) if total else math.inf
    return MomentResult(rate_constant(lam) * total, "pwm", stop + 1, rel, lo.converged and hi.converged)


def probability_weighted_moment(base, r, j, tol=1e-14):
    """``E{Y^r G(Y)^j}`` by quadrature in probability space."""
    lower = integrate(lambda v: base.ppf(v) ** r * v**j, (0.0, 0.5), tol, 1e-13)
    upper = integrate(lambda s: base.isf(s) ** r * (1.0 - s) ** j, (0.0, 0.5), tol, 1e-13)
    return lower.value + upper.value, lower.abs_error_estimate + upper.abs_error_estimate


# -------------------------------------------------------- power series (beta)


def _beta_coeffs_mp(a, b, K):
    scale = 1 / mpmath.beta(a, b)
    coeffs, t = [], mpmath.mpf(1)
    for k in range(K):
        if k > 0:
            t *= (k - mpmath.mpf(b)) / k
        coeffs.append(scale * t / (a + k))
    return coeffs


def moment_powerseries(model, r, policy=_DEFAULT_POLICY):
    """``E(X^r)`` for a beta base from the double series in base moments.

    Uses ``G(x) = sum_k a_k x^(k+a)``, the coefficients ``c_{j,k}`` of the
    j-th power of ``sum_k a_k x^k`` and ``E(Y^v) = B(v+a, b) / B(a, b)``.
    The inner sums cancel heavily (their terms grow like
    ``(sum_k |a_k|)^j``) so the whole double sum is carried out in
    multiprecision, with working precision chosen from that growth.
    """
    r = _check_order(r)
    base = model.base
    if not isinstance(base, Beta):
        raise ParameterError("the power-series moment route applies to the beta family")
    _check_base_moment(model, r)
    lam = model.lam
    a, b = base.a, base.b
    integer_b = float(b).is_integer()
    K_inner = int(b) if integer_b else min(policy.max_terms, 200)

    # terms in lam^j/j! are negligible past j ~ e|lam| + 40
    j_cap = min(policy.max_terms, int(math.e * abs(lam)) + 60)
    with mpmath.workdps(30):
        growth = float(mpmath.log10(sum(abs(c) for c in _beta_coeffs_mp(a, b, K_inner))))
    dps = int(25 + abs(lam) / math.log(10) + j_cap * max(growth, 0.0))

    with mpmath.workdps(dps):
        A = _beta_coeffs_mp(a, b, K_inner)
        mlam = -mpmath.mpf(lam)
        rr, aa, bb = mpmath.mpf(r), mpmath.mpf(a), mpmath.mpf(b)
        log_b_ab = mpmath.log(mpmath.beta(aa, bb))
        total = mpmath.mpf(0)
        fact = mpmath.mpf(1)
        last = mpmath.inf
        inner_ok = True
        for j in range(j_cap):
            if j > 0:
                fact *= mlam / j
            K_j = j * (K_inner - 1) + 1 if integer_b else K_inner
            c = power_recurrence(A, j, K_j)
            # E(Y^(s+1)) / E(Y^s) = (s + a) / (s + a + b)
            s = rr + j * aa
            ey = mpmath.exp(mpmath.log(mpmath.beta(s + aa, bb)) - log_b_ab)
            inner = mpmath.mpf(0)
            for k in range(K_j):
                piece = c[k] * ey
                inner += piece
                ey *= (s + k + aa) / (s + k + aa + bb)
            if not integer_b and abs(piece) > policy.rel_tol * abs(inner):
                inner_ok = False
            term = fact * inner
            total += term
            last = abs(term)
            if j >= abs(lam) and last <= policy.rel_tol * abs(total):
                break
        else:
            if last > policy.rel_tol * abs(total):
                raise TruncationError(
                    f"power series did not converge in {j_cap} outer terms",
                    partial=float(total) * rate_constant(lam),
                    terms=j_cap,
                )
        value = float(mpmath.mpf(rate_constant(lam)) * total)
        rel = float(last / abs(total)) if total else math.inf
    return MomentResult(value, "powerseries", j + 1, rel, inner_ok)


# ------------------------------------------------------- closed-form families


def _exp_weighted_series(z, s, policy):
    """``sum_{k>=0} z^k / (k! (k+1)^s)`` as ``(log|sum|, sign, terms, tail)``.

    Positive ``z`` is summed in the log domain; negative ``z`` alternates
    and is summed in multiprecision with enough guard digits to absorb the
    ``e^|z|`` cancellation.
    """
    if z == 0.0:
        return 0.0, 1.0, 1, 0.0
    if z > 0:
        logz = math.log(z)
        stop = math.log(policy.rel_tol) - 3.0
        total = -math.inf
        for k in range(policy.max_terms):
            lt = k * logz - math.lgamma(k + 1.0) - s * math.log(k + 1.0)
            total = np.logaddexp(total, lt)
            if k > z and lt - total < stop:
                break
        else:
            raise TruncationError(
                f"series did not converge in {policy.max_terms} terms",
                partial=float(np.exp(total)),
                terms=policy.max_terms,
            )
        return float(total), 1.0, k + 1, math.exp(lt - total)
    dps = int(20 + abs(z) / math.log(10))
    with mpmath.workdps(dps):
        zz, ss = mpmath.mpf(z), mpmath.mpf(s)
        total, term = mpmath.mpf(0), mpmath.mpf(1)
        for k in range(policy.max_terms):
            if k > 0:
                term *= zz / k
            piece = term / mpmath.power(k + 1, ss)
            total += piece
            if k > abs(z) and abs(piece) <= policy.rel_tol * 1e-3 * abs(total):
                break
        else:
            raise TruncationError(
                f"series did not converge in {policy.max_terms} terms",
                partial=float(total),
                terms=policy.max_terms,
            )
        sign = 1.0 if total > 0 else -1.0
        return float(mpmath.log(abs(total))), sign, k + 1, float(abs(piece / total))


def _term_budget(lam, policy):
    """Enlarge ``max_terms`` so a convergent closed-form series can finish.

    The terms of ``sum z^k / k!`` peak near ``k = |z|`` and are negligible
    beyond ``e |z|``, so a smaller budget could only fail spuriously.
    """
    need = int(math.e * abs(lam)) + 100
    if policy.max_terms >= need:
        return policy
    return TruncationPolicy(policy.rel_tol, need)


def expweibull_moment(lam, beta, alpha, r, policy=_DEFAULT_POLICY):
    """r-th moment of exp-Weibull(lam, beta, alpha).

    Positive ``lam`` is summed in the log domain, so ``lam`` well past 700
    is fine; negative ``lam`` uses multiprecision.

    ``lam beta^r Gamma(r/alpha + 1) / (e^lam - 1) sum_k lam^k / (k! (k+1)^(r/alpha+1))``.
    Negative ``r > -alpha`` is allowed, which the exp-Frechet moments use.

    Examples
    --------
    >>> round(float(expweibull_moment(1.0, 1.0, 1.0, 1)), 5)
    0.76699
    """
    lam = float(lam)
    r = _check_order(r)
    if beta <= 0 or alpha <= 0:
        raise ParameterError("alpha and beta must be positive")
    if r <= -alpha:
        raise NonexistentMomentError(f"E(X^{r:g}) diverges (requires r > -alpha={-alpha:g})")
    s = r / alpha + 1.0
    log_base = r * math.log(beta) + math.lgamma(s)
    if lam == 0.0:
        return MomentResult(math.exp(log_base), "closed-form", 1, 0.0, True)
    log_sum, sign, terms, tail = _exp_weighted_series(lam, s, _term_budget(lam, policy))
    # lam / (e^lam - 1) = rate(lam) e^{-lam}
    log_pref = log_rate_constant(lam) - lam
    value = sign * math.exp(log_pref + log_base + log_sum)
    return MomentResult(value, "closed-form", terms, tail, True)


def expfrechet_moment(lam, beta, alpha, r, policy=_DEFAULT_POLICY):
    """r-th moment of exp-Frechet(lam, beta, alpha), ``r < alpha``.

    ``-lam beta^r Gamma(1 - r/alpha) / (e^-lam - 1) sum_k (-lam)^k / (k! (k+1)^(1-r/alpha))``,
    which follows from the exp-Weibull moment of the reciprocal.
    """
    lam = float(lam)
    r = _check_order(r)
    if beta <= 0 or alpha <= 0:
        raise ParameterError("alpha and beta must be positive")
    if r >= alpha:
        raise NonexistentMomentError(
            f"E(X^{r:g}) diverges for the exp-Frechet family (requires r < alpha={alpha:g})"
        )
    s = 1.0 - r / alpha
    log_base = r * math.log(beta) + math.lgamma(s)
    if lam == 0.0:
        return MomentResult(math.exp(log_base), "closed-form", 1, 0.0, True)
    log_sum, sign, terms, tail = _exp_weighted_series(-lam, s, _term_budget(lam, policy))
    log_pref = log_rate_constant(-lam) + lam
    value = sign * math.exp(log_pref + log_base + log_sum)
    return MomentResult(value, "closed-form", terms, tail, True)


# ------------------------------------------------------------ dispatcher


def moment(model, r, route="auto", policy=_DEFAULT_POLICY):
    """r-th raw moment by the most reliable available route.

    ``route`` is one of ``auto``, ``closed-form``, ``pwm``, ``powerseries``
    or ``quadrature``. ``auto`` prefers the exp-Weibull/exp-Frechet closed
    forms, then the power series (beta with integer ``b``), then the pwm
    series, and uses quadrature when ``|lam| > 30`` or a series fails.
    """
    r = _check_order(r)
    _check_base_moment(model, r)
    b = model.base
    if route == "quadrature" or b.discrete:
        return moment_quadrature(model, r)
    if route == "closed-form" or (route == "auto" and isinstance(b, (Weibull, Frechet))):
        if isinstance(b, Weibull):
            return expweibull_moment(model.lam, b.beta, b.alpha, r, policy)
        if isinstance(b, Frechet):
            return expfrechet_moment(model.lam, b.beta, b.alpha, r, policy)
        raise ParameterError(f"no closed-form moments for the {b.family} family")
    if route == "powerseries":
        return moment_powerseries(model, r, policy)
    if route == "pwm":
        return moment_pwm_series(model, r, policy)
    if route != "auto":
        raise ParameterError(f"unknown moment route {route!r}")

    if abs(model.lam) > SERIES_LAMBDA_LIMIT:
        return _fallback(model, r, "|lambda| > 30")
    try:
        if isinstance(b, Beta) and float(b.b).is_integer():
            res = moment_powerseries(model, r, policy)
        else:
            res = moment_pwm_series(model, r, policy)
    except TruncationError:
        return _fallback(model, r, "series truncation")
    if not res.converged or res.achieved_tol > AUTO_ROUTE_TOL:
        return _fallback(model, r, f"{res.route} accuracy")
    return res


def _fallback(model, r, reason):
    res = moment_quadrature(model, r)
    return MomentResult(res.value, f"quadrature ({reason})", res.terms, res.achieved_tol, res.converged)


# ------------------------------------------------------- order statistics


def _log_abs_one_minus_exp(x):
    """``log|1 - e^{-x}|`` for ``x != 0``."""
    if x > 0:
        return math.log(-math.expm1(-x))
    return -x + math.log(-math.expm1(x))


def order_stat_weights(lam, i, n):
    """Coefficients ``w[j, k]`` of ``f_{i:n} = sum w[j, k] f_{j,k}``.

    ``f_{j,k}`` is the exp-G density with parameter ``lam (j+k+1)``; the
    weights sum to 1. Returned as a dict keyed by ``(j, k)``.
    """
    i, n = _check_order_index(i, n)
    lam = float(lam)
    if lam == 0.0:
        raise ParameterError("the order-statistic expansion degenerates at lambda = 0")
    sgn_lam = 1.0 if lam > 0 else -1.0
    log_norm = -special.betaln(i, n - i + 1) - n * _log_abs_one_minus_exp(lam)
    out = {}
    for j in range(i):
        for k in range(n - i + 1):
            m = j + k + 1
            logw = (
                math.log(special.comb(i - 1, j, exact=True))
                + math.log(special.comb(n - i, k, exact=True))
                - lam * (n - k - i)
                + _log_abs_one_minus_exp(lam * m)
                - math.log(m)
                + log_norm
            )
            sign = (-1.0) ** (n + j - k - i) * sgn_lam ** (n + 1)
            out[(j, k)] = sign * math.exp(logw)
    return out


def weight_condition(weights):
    """``sum |w|``: the factor by which component errors are amplified."""
    return float(sum(abs(w) for w in weights.values()))


def _check_order_index(i, n):
    i, n = int(i), int(n)
    if not 1 <= i <= n:
        raise ParameterError(f"order statistic index must satisfy 1 <= i <= n, got i={i}, n={n}")
    return i, n


def order_stat_pdf(model, i, n, x, route="direct"):
    """Density of the i-th order statistic of an n-sample.

    ``route="direct"`` evaluates ``f F^(i-1) (1-F)^(n-i) / B(i, n-i+1)``;
    ``route="expansion"`` sums the finite linear combination of exp-G
    densities with parameters ``lam (j+k+1)``.
    """
    i, n = _check_order_index(i, n)
    x = np.asarray(x, dtype=float)
    if route == "direct":
        with np.errstate(divide="ignore"):
            logv = (
                np.log(model.pdf(x))
                + (i - 1) * np.log(model.cdf(x))
                + (n - i) * np.log(model.sf(x))
                - special.betaln(i, n - i + 1)
            )
        out = np.exp(logv)
    elif route == "expansion":
        weights = order_stat_weights(model.lam, i, n)
        out = np.zeros_like(x)
        for (j, k), w in weights.items():
            out = out + w * np.asarray(model.with_lambda(model.lam * (j + k + 1)).pdf(x))
    else:
        raise ParameterError(f"unknown route {route!r}")
    return float(out) if out.ndim == 0 else out


def order_stat_moment(model, i, n, r, route="auto", policy=_DEFAULT_POLICY, rel_tol=1e-8):
    """``E(X_{i:n}^r)``.

    The expansion route combines moments of exp-G(lam (j+k+1)) variables.
    Its weights alternate in sign and grow as ``lam -> 0``; when
    ``sum|w|`` times the component accuracy exceeds ``rel_tol`` the
    quadrature route is used instead, integrating ``Q(w)^r`` against the
    Beta(i, n-i+1) density.
    """
    i, n = _check_order_index(i, n)
    r = _check_order(r)
    _check_base_moment(model, r)
    if i == n == 1:
        return moment(model, r, policy=policy)

    if route in ("auto", "expansion") and model.lam != 0.0:
        weights = order_stat_weights(model.lam, i, n)
        cond = weight_condition(weights)
        comps = [moment(model.with_lambda(model.lam * (j + k + 1)), r, policy=policy)
                 for (j, k) in weights]
        value = sum(w * c.value for w, c in zip(weights.values(), comps))
        err = sum(abs(w * c.value) * max(c.achieved_tol, 1e-15) for w, c in zip(weights.values(), comps))
        rel = err / abs(value) if value else math.inf
        if route == "expansion" or rel <= rel_tol:
            routes = sorted({c.route for c in comps})
            return MomentResult(value, "expansion[" + ",".join(routes) + "]",
                                len(weights), max(rel, cond * _EPS), rel <= rel_tol)
        reason = f"expansion condition {cond:.2g}"
    elif route == "expansion":
        raise ParameterError("the expansion route is unavailable at lambda = 0")
    elif route != "quadrature" and route != "auto":
        raise ParameterError(f"unknown route {route!r}")
    else:
        reason = "lambda = 0" if model.lam == 0.0 else "requested"

    log_b = special.betaln(i, n - i + 1)

    def weight(w):
        if w <= 0.0 or w >= 1.0:
            return 0.0
        return math.exp((i - 1) * math.log(w) + (n - i) * math.log1p(-w) - log_b)

    value, err, nev, ok = quantile_integral(model, lambda x: x**r, weight)
    rel = err / abs(value) if value else err
    return MomentResult(value, f"quadrature ({reason})", nev, rel, ok)


def expweibull_order_moment(lam, beta, alpha, i, n, r, policy=_DEFAULT_POLICY):
    """``E(X_{i:n}^r)`` for exp-Weibull(lam, beta, alpha) as a triple series.

    The (j, k) term is
    ``(-1)^(n+j-k-i) C(i-1, j) C(n-i, k) e^{-lam(n+j-i+1)} sum_l (lam m)^l / (l! (l+1)^s)``
    with ``m = j+k+1`` and ``s = r/alpha + 1``. The exponential factor is
    the generic ``e^{-lam(n-k-i)}`` times the ``e^{-lam m}`` produced when
    the component rate constants are multiplied out.
    """
    i, n = _check_order_index(i, n)
    lam, r = float(lam), _check_order(r)
    if lam == 0.0:
        raise ParameterError("the order-statistic series degenerates at lambda = 0")
    if r <= -alpha:
        raise NonexistentMomentError(f"E(X^{r:g}) diverges (requires r > -alpha)")
    s = r / alpha + 1.0
    log_pref = (
        math.log(abs(lam)) + r * math.log(beta) + math.lgamma(s)
        - special.betaln(i, n - i + 1) - n * _log_abs_one_minus_exp(lam)
    )
    sign_pref = (1.0 if lam > 0 else -1.0) ** (n + 1)
    total, abs_total, terms, tail = 0.0, 0.0, 0, 0.0
    for j in range(i):
        for k in range(n - i + 1):
            m = j + k + 1
            log_sum, sgn, nt, tl = _exp_weighted_series(lam * m, s, _term_budget(lam * m, policy))
            logt = (
                math.log(special.comb(i - 1, j, exact=True))
                + math.log(special.comb(n - i, k, exact=True))
                - lam * (n + j - i + 1) + log_sum + log_pref
            )
            t = sign_pref * sgn * (-1.0) ** (n + j - k - i) * math.exp(logt)
            total += t
            abs_total += abs(t)
            terms += nt
            tail = max(tail, tl)
    rel = max(tail, abs_total / abs(total) * 1e-15) if total else math.inf
    return MomentResult(total, "closed-form", terms, rel, rel <= AUTO_ROUTE_TOL)


# ------------------------------------------------------ shape descriptors


def central_moments(model, policy=_DEFAULT_POLICY):
    """Mean and central moments of orders 2-4."""
    raw = [moment(model, r, policy=policy).value for r in (1, 2, 3, 4)]
    mu = raw[0]
    var = raw[1] - mu * mu
    # raw-to-central conversion loses about (mu/sigma)^4 in relative accuracy
    if var > 0 and (mu * mu / var) ** 2 * 1e-12 < 1e-8:
        m3 = raw[2] - 3 * mu * raw[1] + 2 * mu**3
        m4 = raw[3] - 4 * mu * raw[2] + 6 * mu * mu * raw[1] - 3 * mu**4
        return mu, var, m3, m4
    cm = [quantile_integral(model, lambda x, p=p: (x - mu) ** p)[0] for p in (2, 3, 4)]
    return (mu, *cm)


def skewness_kurtosis(model, excess=False, policy=_DEFAULT_POLICY):
    """Skewness and (Pearson) kurtosis; ``excess=True`` subtracts 3."""
    mu, m2, m3, m4 = central_moments(model, policy)
    skew = m3 / m2**1.5
    kurt = m4 / m2**2
    return skew, kurt - 3.0 if excess else kurt
