"""Truncated-exponential transform on the unit interval.

Every member of the family is built by pushing a base cdf through

    F_lam(x) = (1 - exp(-lam x)) / (1 - exp(-lam)),     lam != 0
    F_0(x)   = x

The helpers here evaluate that kernel and the scalar functions of ``lam``
derived from it without cancellation near ``lam = 0`` and without
overflow for large ``|lam|``.
"""

import math

import numpy as np

from ._validation import check_lambda, check_unit

#: Below this magnitude the ``lam``-only quantities switch to Taylor series.
SERIES_THRESHOLD = 1e-5


def _scalar_or_array(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def rate_constant(lam):
    """Normalising constant ``lam / (1 - exp(-lam))``, equal to 1 at ``lam = 0``."""
    lam = check_lambda(lam)
    if abs(lam) < SERIES_THRESHOLD:
        return 1.0 + lam / 2.0 + lam * lam / 12.0 - lam**4 / 720.0
    if lam < -700.0:
        return math.exp(log_rate_constant(lam))
    return lam / -math.expm1(-lam)


def log_rate_constant(lam):
    """Logarithm of :func:`rate_constant`, finite for every real ``lam``."""
    lam = check_lambda(lam)
    if abs(lam) < SERIES_THRESHOLD:
        return lam / 2.0 - lam * lam / 24.0 + lam**4 / 2880.0
    if lam > 0:
        return math.log(lam) - math.log(-math.expm1(-lam))
    # lam/(1-e^{-lam}) = |lam| e^{lam} / (1 - e^{lam}) for lam < 0
    return math.log(-lam) + lam - math.log(-math.expm1(lam))


def texp_mean(lam):
    """Mean of the truncated exponential, ``1/lam - 1/(exp(lam) - 1)``.

    This is also ``d log rate_constant / d lam`` and tends to 1/2 at 0.
    """
    lam = check_lambda(lam)
    if abs(lam) < 0.05:
        return (
            0.5 - lam / 12.0 + lam**3 / 720.0 - lam**5 / 30240.0
            + lam**7 / 1209600.0
        )
    if lam > 700.0:
        return 1.0 / lam
    return 1.0 / lam - 1.0 / math.expm1(lam)


def texp_information(lam):
    """Fisher information of ``lam`` in the truncated exponential.

    ``1/lam**2 - exp(lam)/(exp(lam) - 1)**2``, with limit 1/12 at 0.
    """
    lam = check_lambda(lam)
    if abs(lam) < 0.05:
        lam2 = lam * lam
        return 1.0 / 12.0 - lam2 / 240.0 + lam2**2 / 6048.0 - lam2**3 / 172800.0
    # exp(lam)/(exp(lam)-1)^2 == 1 / (4 sinh^2(lam/2))
    half = abs(lam) / 2.0
    if half > 300.0:
        tail = math.exp(-2.0 * half)
    else:
        tail = 1.0 / (4.0 * math.sinh(half) ** 2)
    return 1.0 / (lam * lam) - tail


def texp_cdf(lam, x):
    """Cumulative distribution function of the transform on [0, 1]."""
    lam = check_lambda(lam)
    x = check_unit(x, "x")
    if lam == 0.0:
        return _scalar_or_array(x.copy())
    with np.errstate(over="ignore"):
        if lam > 0:
            out = np.expm1(-lam * x) / math.expm1(-lam)
        else:
            # multiply through by exp(lam) so nothing overflows
            out = np.exp(lam * (1.0 - x)) * np.expm1(lam * x) / math.expm1(lam)
    return _scalar_or_array(np.clip(out, 0.0, 1.0))


def texp_pdf(lam, x):
    """Density ``rate_constant(lam) * exp(-lam x)`` on [0, 1]."""
    lam = check_lambda(lam)
    x = check_unit(x, "x")
    return _scalar_or_array(np.exp(log_rate_constant(lam) - lam * x))


def texp_quantile(lam, u):
    """Inverse of :func:`texp_cdf`."""
    lam = check_lambda(lam)
    u = check_unit(u, "u")
    if lam == 0.0:
        return _scalar_or_array(u.copy())
    with np.errstate(divide="ignore"):
        if lam > 0:
            arg = u * math.expm1(-lam)
            # near arg = -1 evaluate 1 + arg as (1-u) + u e^{-lam} directly
            log_term = np.where(
                arg > -0.5,
                np.log1p(arg),
                np.log((1.0 - u) + u * math.exp(-lam)),
            )
            out = -log_term / lam
        else:
            # 1 + u(e^{|lam|} - 1) = e^{|lam|} (u + (1-u) e^{lam})
            arg = (1.0 - u) * math.expm1(lam)
            log_term = np.where(
                arg > -0.5,
                np.log1p(arg),
                np.log(u + (1.0 - u) * math.exp(lam)),
            )
            out = 1.0 + log_term / -lam
    return _scalar_or_array(np.clip(out, 0.0, 1.0))
