"""Numerical utilities: adaptive quadrature, expectations, finite differences,
and the chi-square / normal tail functions used by the tests of hypotheses.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy import stats

from .exceptions import DomainError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool

    def __float__(self):
        return float(self.value)


def _semi_infinite(f, lo, hi, scale):
    """Map ``f`` on an interval with infinite end(s) onto a finite one.

    ``[a, inf)`` uses ``x = a + scale * t / (1 - t)`` on ``t in [0, 1)``.
    """
    if math.isinf(lo) and math.isinf(hi):
        raise ValueError("doubly infinite intervals are split by the caller")
    if math.isinf(hi):
        def g(t):
            s = 1.0 - t
            return f(lo + scale * t / s) * scale / (s * s)
    else:
        def g(t):
            s = 1.0 - t
            return f(hi - scale * t / s) * scale / (s * s)
    return g


def integrate(f, interval, tol=1e-10, rel_tol=1e-12, limit=200, scale=1.0):
    """Adaptive Gauss-Kronrod integral of a scalar function.

    Parameters
    ----------
    f : callable
        Scalar integrand, finite on the open interval. Integrable endpoint
        singularities are handled by the extrapolating QUADPACK driver.
    interval : tuple
        ``(low, high)``; either end may be infinite.
    tol, rel_tol : float
        Absolute and relative accuracy requested.
    scale : float
        Length scale of the substitution used on infinite intervals.

    Returns
    -------
    QuadResult
        Non-convergence is reported through ``converged``, never silently.
    """
    lo, hi = map(float, interval)
    if lo == hi:
        return QuadResult(0.0, 0.0, 0, True)
    if lo > hi:
        res = integrate(f, (hi, lo), tol, rel_tol, limit, scale)
        return QuadResult(-res.value, res.abs_error_estimate, res.evaluations, res.converged)
    if math.isinf(lo) and math.isinf(hi):
        left = integrate(f, (-math.inf, 0.0), tol / 2, rel_tol, limit, scale)
        right = integrate(f, (0.0, math.inf), tol / 2, rel_tol, limit, scale)
        return QuadResult(
            left.value + right.value,
            left.abs_error_estimate + right.abs_error_estimate,
            left.evaluations + right.evaluations,
            left.converged and right.converged,
        )
    g, a, b = f, lo, hi
    if math.isinf(lo) or math.isinf(hi):
        g, a, b = _semi_infinite(f, lo, hi, scale), 0.0, 1.0
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        out = _integrate.quad(g, a, b, epsabs=tol, epsrel=rel_tol, limit=limit, full_output=1)
    value, err, info = out[0], out[1], out[2]
    ier_ok = len(out) == 3
    converged = bool(np.isfinite(value)) and (ier_ok or err <= max(tol, rel_tol * abs(value)))
    return QuadResult(float(value), float(abs(err)), int(info["neval"]), converged)


def integrate_vec(f, interval, tol=1e-10, rel_tol=1e-12, scale=1.0, limit=2000):
    """Vector-valued counterpart of :func:`integrate`.

    ``f`` returns an array; every component shares one adaptive mesh.
    ``value`` and ``abs_error_estimate`` of the result are arrays.
    """
    lo, hi = map(float, interval)
    if math.isinf(lo) and math.isinf(hi):
        raise ValueError("doubly infinite intervals are not supported here")
    g, a, b = f, lo, hi
    if math.isinf(lo) or math.isinf(hi):
        g, a, b = _semi_infinite(f, lo, hi, scale), 0.0, 1.0
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        value, err, info = _integrate.quad_vec(
            g, a, b, epsabs=tol, epsrel=rel_tol, norm="max", limit=limit, full_output=True
        )
    value = np.asarray(value, dtype=float)
    finite = bool(np.all(np.isfinite(value)))
    # a "rounding error" stop still counts when the estimate meets the target
    met = err <= max(tol, rel_tol * float(np.max(np.abs(value)))) if finite else False
    converged = finite and (bool(info.success) or met)
    return QuadResult(value, float(err), int(info.neval), converged)


def expectation(model, h, tol=1e-10, rel_tol=1e-12):
    """``E[h(X)]`` under a continuous model, by quadrature against its density.

    ``h`` may return a scalar or an array; array-valued integrands are
    integrated on a shared adaptive mesh.
    """
    lo, hi = model.base.support
    scale = 1.0
    if math.isinf(hi):
        scale = float(model.quantile(0.5)) or 1.0

    def integrand(x):
        if not lo < x < hi:
            return 0.0 * np.asarray(h(model.quantile(0.5)))
        dens = model.pdf(x)
        if dens == 0.0:
            return 0.0 * np.asarray(h(x))
        return dens * np.asarray(h(x))

    probe = np.asarray(h(model.quantile(0.5)))
    if probe.ndim == 0:
        return integrate(lambda x: float(integrand(x)), (lo, hi), tol, rel_tol, scale=scale)
    return integrate_vec(integrand, (lo, hi), tol, rel_tol, scale=scale)


def graded_rule(levels=48, order=16):
    """Composite Gauss-Legendre rule on (0, 1) graded toward both ends.

    Panels are ``[2^-(k+1), 2^-k]`` for ``k < levels`` on each half, which
    resolves integrable log and power singularities at the endpoints.
    Returns ``(u, s, w)`` with ``s = 1 - u`` formed without cancellation.
    """
    x, wx = np.polynomial.legendre.leggauss(order)
    edges = 0.5 ** np.arange(levels + 1)[::-1] * 0.5  # 2^-(levels+1) ... 1/2
    edges = np.concatenate([[0.0], edges])
    d_nodes, d_weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        d_nodes.append(lo + (hi - lo) * (x + 1.0) / 2.0)
        d_weights.append(wx * (hi - lo) / 2.0)
    d = np.concatenate(d_nodes)
    w = np.concatenate(d_weights)
    # d is the distance to the nearer endpoint
    u = np.concatenate([d, 1.0 - d[::-1]])
    s = np.concatenate([1.0 - d, d[::-1]])
    return u, s, np.concatenate([w, w[::-1]])


def quantile_integral(model, h, weight=None, tol=1e-13, rel_tol=1e-12):
    """``int_0^1 h(Q(w)) weight(w) dw`` where ``Q`` is the model quantile.

    This is ``E[h(X)]`` when ``weight`` is omitted. The upper half is
    integrated through the inverse survival function so heavy right tails
    keep full precision. Array-valued ``h`` shares one adaptive mesh per
    half. Returns ``(value, abs_error, evaluations, converged)``.
    """
    if weight is None:
        lo_f = lambda w: h(model.quantile(w))  # noqa: E731
        hi_f = lambda s: h(model.isf(s))  # noqa: E731
    else:
        lo_f = lambda w: h(model.quantile(w)) * weight(w)  # noqa: E731
        hi_f = lambda s: h(model.isf(s)) * weight(1.0 - s)  # noqa: E731
    vector = np.ndim(h(model.quantile(0.5))) > 0
    quad = integrate_vec if vector else integrate
    lower = quad(lo_f, (0.0, 0.5), tol, rel_tol)
    upper = quad(hi_f, (0.0, 0.5), tol, rel_tol)
    value = lower.value + upper.value
    err = lower.abs_error_estimate + upper.abs_error_estimate
    return value, err, lower.evaluations + upper.evaluations, lower.converged and upper.converged


def fd_gradient(f, point, steps=None, tol=EPS):
    """Central-difference gradient with steps ``tol**(1/3) * max(1, |x_i|)``."""
    x = np.asarray(point, dtype=float)
    h = _steps(x, steps, tol ** (1.0 / 3.0))
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        grad[i] = (f(x + e) - f(x - e)) / (2.0 * h[i])
    return grad


def fd_jacobian(F, point, steps=None, tol=EPS):
    """Central-difference Jacobian of a vector function, rows indexing outputs."""
    x = np.asarray(point, dtype=float)
    h = _steps(x, steps, tol ** (1.0 / 3.0))
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2.0 * h[i]))
    return np.stack(cols, axis=-1)


def fd_hessian(f, point, steps=None, tol=EPS):
    """Central-difference Hessian; steps ``tol**(1/4) * max(1, |x_i|)``."""
    x = np.asarray(point, dtype=float)
    h = _steps(x, steps, tol ** 0.25)
    n = x.size
    H = np.empty((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return H


def _steps(x, steps, base):
    if steps is not None:
        return np.broadcast_to(np.asarray(steps, dtype=float), x.shape).copy()
    return base * np.maximum(1.0, np.abs(x))


def chi2_sf(x, q):
    """Upper tail probability of the chi-square distribution with ``q`` d.o.f."""
    if not q >= 1:
        raise DomainError(f"degrees of freedom must be at least 1, got {q}")
    if x <= 0:
        return 1.0
    return float(stats.chi2.sf(x, q))


def normal_quantile(p):
    """Standard normal quantile function."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return float(stats.norm.ppf(p))
