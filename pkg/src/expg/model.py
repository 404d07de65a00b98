"""The exp-G distribution: a base cdf pushed through the truncated-exponential kernel."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_lambda, check_unit
from .base import BaseDistribution, make_base
from .exceptions import DomainError, ParameterError, UnsupportedOperationError
from .transform import log_rate_constant, texp_cdf, texp_quantile


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


@dataclass(frozen=True)
class ExpGModel:
    """exp-G(lam, theta): cdf ``F_lam(G(x; theta))``.

    Parameters
    ----------
    lam : float
        Concentration parameter; any finite real, ``0`` recovers the base.
    base : BaseDistribution
        The distribution being extended.

    Examples
    --------
    >>> from expg import ExpGModel, Weibull
    >>> m = ExpGModel(1.0, Weibull(1.0, 1.0))
    >>> round(m.cdf(1.0), 4)
    0.7412
    """

    lam: float
    base: BaseDistribution

    def __post_init__(self):
        object.__setattr__(self, "lam", check_lambda(self.lam))
        if not isinstance(self.base, BaseDistribution):
            raise ParameterError(f"base must be a BaseDistribution, got {type(self.base).__name__}")

    @classmethod
    def from_params(cls, family, params):
        """Build from a family name and the vector ``(lam, *theta)``."""
        params = np.asarray(params, dtype=float).ravel()
        return cls(float(params[0]), make_base(family, params[1:]))

    @property
    def params(self):
        return np.concatenate([[self.lam], self.base.theta])

    @property
    def param_names(self):
        return ("lambda",) + tuple(self.base.param_names)

    @property
    def family(self):
        return self.base.family

    def with_lambda(self, lam):
        return ExpGModel(lam, self.base)

    def with_params(self, params):
        params = np.asarray(params, dtype=float).ravel()
        return ExpGModel(float(params[0]), self.base.with_theta(params[1:]))

    def _require_continuous(self, what):
        if self.base.discrete:
            raise UnsupportedOperationError(
                f"{what} is undefined for the discrete {self.base.family} base; use pmf"
            )

    def cdf(self, x):
        return texp_cdf(self.lam, self.base.cdf(x))

    def sf(self, x):
        # 1 - F_lam(u) = F_{-lam}(1 - u), which keeps the upper tail accurate
        return texp_cdf(-self.lam, self.base.sf(x))

    survival = sf

    def logpdf(self, x):
        """``log rate(lam) + log g(x) - lam G(x)``, never exponentiated."""
        self._require_continuous("logpdf")
        x = np.asarray(x, dtype=float)
        return _out(log_rate_constant(self.lam) + np.asarray(self.base.logpdf(x))
                    - self.lam * np.asarray(self.base.cdf(x)))

    def pdf(self, x):
        self._require_continuous("pdf")
        x = np.asarray(x, dtype=float)
        lo, hi = self.base.support
        inside = (x > lo) & (x < hi)
        xi = np.where(inside, x, self.base._interior)
        with np.errstate(all="ignore"):
            val = np.exp(
                log_rate_constant(self.lam) + self.base._logpdf(xi) - self.lam * self.base.cdf(xi)
            )
        return _out(np.where(inside, val, 0.0))

    def hazard(self, x):
        """``pdf / sf``; equals ``lam g / (1 - exp(-lam S))`` for ``lam != 0``.

        Raises :class:`DomainError` where the survival function vanishes.
        """
        self._require_continuous("hazard")
        x = np.asarray(x, dtype=float)
        S = np.asarray(self.base.sf(x))
        if np.any(S <= 0.0):
            raise DomainError("hazard is undefined where the survival function is zero")
        g = np.asarray(self.base.pdf(x))
        if self.lam == 0.0:
            return _out(g / S)
        # lam / (1 - exp(-lam S)) = rate_constant(lam S) / S
        lamS = self.lam * S
        with np.errstate(all="ignore"):
            small = np.abs(lamS) < 1e-8
            denom = np.where(small, S * (1.0 - lamS / 2.0), -np.expm1(-lamS) / self.lam)
        return _out(g / denom)

    def quantile(self, u):
        u = check_unit(u, "u")
        return self.base.ppf(texp_quantile(self.lam, u))

    ppf = quantile

    def isf(self, s):
        """Inverse survival function, accurate for small ``s``."""
        s = check_unit(s, "s")
        return self.base.isf(texp_quantile(-self.lam, s))

    def sample(self, n, seed=None):
        """Draw ``n`` values by inverse-transform sampling.

        ``seed`` is anything :func:`numpy.random.default_rng` accepts; equal
        seeds give identical draws.
        """
        n = int(n)
        if n < 1:
            raise ParameterError(f"n must be at least 1, got {n}")
        rng = np.random.default_rng(seed)
        return np.asarray(self.quantile(rng.random(n)), dtype=float)

    def pmf(self, x):
        """Probability mass for a discrete base, ``F_lam(G(x_i)) - F_lam(G(x_{i-1}))``."""
        if not self.base.discrete:
            raise UnsupportedOperationError(
                f"pmf is undefined for the continuous {self.base.family} base; use pdf"
            )
        x = np.asarray(x, dtype=float)
        pts = np.asarray(self.base.support_points)
        idx = np.searchsorted(pts, x)
        on_support = (idx < pts.size) & (pts[np.minimum(idx, pts.size - 1)] == x)
        prev = np.where(idx > 0, self.base.cdf(pts[np.maximum(idx - 1, 0)]), 0.0)
        mass = np.asarray(texp_cdf(self.lam, self.base.cdf(x))) - np.asarray(texp_cdf(self.lam, prev))
        return _out(np.where(on_support, mass, 0.0))

    def mean(self):
        from .series import moment

        return float(moment(self, 1))

    def __repr__(self):
        return f"ExpGModel(lam={self.lam!r}, base={self.base!r})"


def reciprocal_model(model):
    """Distribution of ``1/X`` for ``X ~ exp-Weibull`` or ``exp-Frechet``.

    The reciprocal of a base ``G`` has cdf ``S_G(1/x)``, so ``1/X`` is
    exp-G with parameter ``-lam`` over the reciprocal base.
    """
    from .base import Frechet, Weibull

    b = model.base
    if isinstance(b, Weibull):
        return ExpGModel(-model.lam, Frechet(b.alpha, 1.0 / b.beta))
    if isinstance(b, Frechet):
        return ExpGModel(-model.lam, Weibull(b.alpha, 1.0 / b.beta))
    raise UnsupportedOperationError(f"no reciprocal family registered for {b.family}")


__all__ = ["ExpGModel", "reciprocal_model"]
