"""Base families G(x; theta) that the exp-G construction extends.

Each family is an immutable value object exposing its cdf, density,
quantile function and the parameter derivatives the likelihood code needs:
the score of the log-density, its Hessian, and the gradient and Hessian of
the cdf. Parameter vectors are ordered as in ``param_names``.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields

import numpy as np
from scipy import special

from ._validation import check_positive, check_unit
from .exceptions import (
    DomainError,
    NonexistentMomentError,
    ParameterError,
    UnsupportedOperationError,
)
from .powerseries import PowerSeries


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


class BaseDistribution(ABC):
    """Interface shared by the base families."""

    family = None
    param_names = ()
    discrete = False

    @property
    def theta(self):
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    @classmethod
    def from_theta(cls, theta):
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != len(cls.param_names):
            raise ParameterError(
                f"{cls.family} takes {len(cls.param_names)} parameters "
                f"{cls.param_names}, got {theta.size}"
            )
        return cls(*theta.tolist())

    def with_theta(self, theta):
        return type(self).from_theta(theta)

    @property
    def k(self):
        return len(self.param_names)

    @property
    @abstractmethod
    def support(self):
        """Closure of the support as ``(low, high)``."""

    @abstractmethod
    def cdf(self, x):
        ...

    def sf(self, x):
        return _out(1.0 - np.asarray(self.cdf(x)))

    @abstractmethod
    def ppf(self, u):
        ...

    def isf(self, s):
        """Inverse survival function; families override it for tail accuracy."""
        s = check_unit(s, "s")
        return self.ppf(1.0 - s)

    # continuous families override the methods below

    def _logpdf(self, x):
        raise UnsupportedOperationError(f"{self.family} has no density")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x > lo) & (x < hi)
        with np.errstate(all="ignore"):
            val = np.where(inside, np.exp(self._logpdf(np.where(inside, x, self._interior))), 0.0)
        return _out(val)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        self._check_interior(x)
        return _out(self._logpdf(x))

    def score(self, x):
        """Gradient of the log-density with respect to ``theta``; shape ``x.shape + (k,)``."""
        x = np.asarray(x, dtype=float)
        self._check_interior(x)
        return self._score(x)

    def logpdf_hessian(self, x):
        x = np.asarray(x, dtype=float)
        self._check_interior(x)
        return self._logpdf_hessian(x)

    def cdf_grad(self, x):
        """Gradient of the cdf with respect to ``theta``; shape ``x.shape + (k,)``."""
        x = np.asarray(x, dtype=float)
        self._check_interior(x)
        return self._cdf_grad(x)

    def cdf_hessian(self, x):
        x = np.asarray(x, dtype=float)
        self._check_interior(x)
        return self._cdf_hessian(x)

    def _score(self, x):
        raise UnsupportedOperationError(f"{self.family} has no density")

    _logpdf_hessian = _cdf_grad = _cdf_hessian = _score

    def _check_interior(self, x):
        lo, hi = self.support
        bad = ~((x > lo) & (x < hi))
        if np.any(bad):
            raise DomainError(
                f"{self.family} log-density is undefined at x={np.asarray(x)[bad].ravel()[0]!r}"
            )

    @property
    def _interior(self):
        lo, hi = self.support
        if math.isinf(hi):
            return lo + 1.0
        return 0.5 * (lo + hi)

    def moment(self, r):
        """Raw moment ``E(Y**r)`` of the base distribution."""
        raise UnsupportedOperationError(f"no closed-form moments for {self.family}")

    def __repr__(self):
        args = ", ".join(f"{n}={getattr(self, n)!r}" for n in self.param_names)
        return f"{type(self).__name__}({args})"


@dataclass(frozen=True, repr=False)
class Weibull(BaseDistribution):
    """Weibull with shape ``alpha`` and scale ``beta``: ``G(x) = 1 - exp(-(x/beta)**alpha)``."""

    alpha: float
    beta: float

    family = "weibull"
    param_names = ("alpha", "beta")

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_positive("alpha", self.alpha))
        object.__setattr__(self, "beta", check_positive("beta", self.beta))

    @property
    def support(self):
        return (0.0, math.inf)

    def _z(self, x):
        with np.errstate(divide="ignore"):
            return np.power(np.maximum(x, 0.0) / self.beta, self.alpha)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x > 0, -np.expm1(-self._z(x)), 0.0))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x > 0, np.exp(-self._z(x)), 1.0))

    def ppf(self, u):
        u = check_unit(u, "u")
        with np.errstate(divide="ignore"):
            return _out(self.beta * np.power(-np.log1p(-u), 1.0 / self.alpha))

    def isf(self, s):
        s = check_unit(s, "s")
        with np.errstate(divide="ignore"):
            return _out(self.beta * np.power(-np.log(s), 1.0 / self.alpha))

    def _logpdf(self, x):
        a, b = self.alpha, self.beta
        return math.log(a) - math.log(b) + (a - 1.0) * np.log(x / b) - self._z(x)

    def _score(self, x):
        a, b = self.alpha, self.beta
        z, L = self._z(x), np.log(x / b)
        return np.stack([1.0 / a + L * (1.0 - z), (a / b) * (z - 1.0)], axis=-1)

    def _logpdf_hessian(self, x):
        a, b = self.alpha, self.beta
        z, L = self._z(x), np.log(x / b)
        haa = -1.0 / a**2 - L * L * z
        hab = (z - 1.0 + a * z * L) / b
        hbb = (a / b**2) * (1.0 - z - a * z)
        return _sym2(haa, hab, hbb)

    def _cdf_grad(self, x):
        a, b = self.alpha, self.beta
        z, L = self._z(x), np.log(x / b)
        ze = z * np.exp(-z)
        return np.stack([ze * L, -ze * a / b], axis=-1)

    def _cdf_hessian(self, x):
        a, b = self.alpha, self.beta
        z, L = self._z(x), np.log(x / b)
        ez = np.exp(-z)
        ze = z * ez
        gaa = (1.0 - z) * ze * L * L
        gab = -(ze / b) * ((1.0 - z) * a * L + 1.0)
        gbb = (a * ze / b**2) * (1.0 + a * (1.0 - z))
        return _sym2(gaa, gab, gbb)

    def moment(self, r):
        if r <= -self.alpha:
            raise NonexistentMomentError(f"Weibull moment of order {r} diverges for alpha={self.alpha}")
        return self.beta**r * math.gamma(1.0 + r / self.alpha)

    @classmethod
    def initial_theta(cls, values):
        """Moment estimate from the log-sample (log Y is Gumbel-distributed)."""
        logs = np.log(values)
        sd = float(np.std(logs))
        alpha = math.pi / (sd * math.sqrt(6.0)) if sd > 0 else 1.0
        beta = math.exp(float(np.mean(logs)) + np.euler_gamma / alpha)
        return np.array([alpha, beta])


@dataclass(frozen=True, repr=False)
class Frechet(BaseDistribution):
    """Frechet with shape ``alpha`` and scale ``beta``: ``G(x) = exp(-(x/beta)**-alpha)``.

    ``X ~ Frechet(alpha, beta)`` exactly when ``1/X ~ Weibull(alpha, 1/beta)``.
    """

    alpha: float
    beta: float

    family = "frechet"
    param_names = ("alpha", "beta")

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_positive("alpha", self.alpha))
        object.__setattr__(self, "beta", check_positive("beta", self.beta))

    @property
    def support(self):
        return (0.0, math.inf)

    def _w(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            return np.power(self.beta / np.maximum(x, 0.0), self.alpha)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x > 0, np.exp(-self._w(x)), 0.0))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x > 0, -np.expm1(-self._w(x)), 1.0))

    def ppf(self, u):
        u = check_unit(u, "u")
        with np.errstate(divide="ignore"):
            return _out(self.beta * np.power(-np.log(u), -1.0 / self.alpha))

    def isf(self, s):
        s = check_unit(s, "s")
        with np.errstate(divide="ignore"):
            return _out(self.beta * np.power(-np.log1p(-s), -1.0 / self.alpha))

    def _logpdf(self, x):
        a, b = self.alpha, self.beta
        return math.log(a) - np.log(x) - a * np.log(x / b) - self._w(x)

    def _score(self, x):
        a, b = self.alpha, self.beta
        w, M = self._w(x), np.log(b / x)
        return np.stack([1.0 / a + M * (1.0 - w), (a / b) * (1.0 - w)], axis=-1)

    def _logpdf_hessian(self, x):
        a, b = self.alpha, self.beta
        w, M = self._w(x), np.log(b / x)
        haa = -1.0 / a**2 - M * M * w
        hab = (1.0 - w - a * w * M) / b
        hbb = -(a / b**2) * (1.0 - w + a * w)
        return _sym2(haa, hab, hbb)

    def _cdf_grad(self, x):
        a, b = self.alpha, self.beta
        w, M = self._w(x), np.log(b / x)
        we = w * np.exp(-w)
        return np.stack([-we * M, -we * a / b], axis=-1)

    def _cdf_hessian(self, x):
        a, b = self.alpha, self.beta
        w, M = self._w(x), np.log(b / x)
        we = w * np.exp(-w)
        gaa = -(1.0 - w) * we * M * M
        gab = -(we / b) * ((1.0 - w) * a * M + 1.0)
        gbb = (a * we / b**2) * (1.0 - a * (1.0 - w))
        return _sym2(gaa, gab, gbb)

    def moment(self, r):
        if r >= self.alpha:
            raise NonexistentMomentError(
                f"Frechet moment of order {r} diverges (requires r < alpha={self.alpha})"
            )
        return self.beta**r * math.gamma(1.0 - r / self.alpha)

    @classmethod
    def initial_theta(cls, values):
        alpha, inv_beta = Weibull.initial_theta(1.0 / np.asarray(values))
        return np.array([alpha, 1.0 / inv_beta])


@dataclass(frozen=True, repr=False)
class Beta(BaseDistribution):
    """Standard beta on (0, 1) with cdf ``I_x(a, b)``."""

    a: float
    b: float

    family = "beta"
    param_names = ("a", "b")

    def __post_init__(self):
        object.__setattr__(self, "a", check_positive("a", self.a))
        object.__setattr__(self, "b", check_positive("b", self.b))

    @property
    def support(self):
        return (0.0, 1.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return _out(special.betainc(self.a, self.b, x))

    def sf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return _out(special.betainc(self.b, self.a, 1.0 - x))

    def ppf(self, u):
        u = check_unit(u, "u")
        return _out(special.betaincinv(self.a, self.b, u))

    def isf(self, s):
        s = check_unit(s, "s")
        return _out(1.0 - special.betaincinv(self.b, self.a, s))

    def _logpdf(self, x):
        a, b = self.a, self.b
        return (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) - special.betaln(a, b)

    def _score(self, x):
        a, b = self.a, self.b
        dab = special.digamma(a + b)
        return np.stack(
            [np.log(x) - special.digamma(a) + dab, np.log1p(-x) - special.digamma(b) + dab],
            axis=-1,
        )

    def _logpdf_hessian(self, x):
        a, b = self.a, self.b
        tab = special.polygamma(1, a + b)
        ones = np.ones_like(x)
        return _sym2(
            (tab - special.polygamma(1, a)) * ones,
            tab * ones,
            (tab - special.polygamma(1, b)) * ones,
        )

    def _cdf_grad(self, x):
        da, db = inc_beta_partials(x, self.a, self.b)
        return np.stack([da, db], axis=-1)

    def _cdf_hessian(self, x):
        a, b = self.a, self.b
        ha, hb = _fd_step(a, 2e-3), _fd_step(b, 2e-3)
        I = lambda aa, bb: special.betainc(aa, bb, x)  # noqa: E731
        mid = I(a, b)

        def second(h, k):
            return (I(a + h, b + k) - 2 * mid + I(a - h, b - k)) / (h + k) ** 2

        def mixed(h, k):
            return (I(a + h, b + k) - I(a + h, b - k) - I(a - h, b + k) + I(a - h, b - k)) / (4 * h * k)

        # one Richardson step on each central difference: O(h^4) truncation
        gaa = (4 * second(ha, 0.0) - second(2 * ha, 0.0)) / 3
        gbb = (4 * second(0.0, hb) - second(0.0, 2 * hb)) / 3
        gab = (4 * mixed(ha, hb) - mixed(2 * ha, 2 * hb)) / 3
        return _sym2(gaa, gab, gbb)

    def moment(self, r):
        if r <= -self.a:
            raise NonexistentMomentError(f"beta moment of order {r} diverges for a={self.a}")
        return math.exp(special.betaln(r + self.a, self.b) - special.betaln(self.a, self.b))

    @classmethod
    def initial_theta(cls, values):
        m, v = float(np.mean(values)), float(np.var(values))
        common = m * (1 - m) / v - 1 if v > 0 else 2.0
        common = max(common, 1e-2)
        return np.array([max(m * common, 1e-2), max((1 - m) * common, 1e-2)])


@dataclass(frozen=True, repr=False)
class Bernoulli(BaseDistribution):
    """Bernoulli on {0, 1} with success probability ``p``."""

    p: float

    family = "bernoulli"
    param_names = ("p",)
    discrete = True
    support_points = (0.0, 1.0)

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 < p < 1.0:
            raise ParameterError(f"p must lie strictly inside (0, 1), got {p}")
        object.__setattr__(self, "p", p)

    @property
    def support(self):
        return (0.0, 1.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x < 0, 0.0, np.where(x < 1, 1.0 - self.p, 1.0)))

    def pmf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x == 0, 1.0 - self.p, np.where(x == 1, self.p, 0.0)))

    def ppf(self, u):
        u = check_unit(u, "u")
        return _out(np.where(u <= 1.0 - self.p, 0.0, 1.0))

    def moment(self, r):
        return self.p


def _sym2(h00, h01, h11):
    row0 = np.stack([h00, h01], axis=-1)
    row1 = np.stack([h01, h11], axis=-1)
    return np.stack([row0, row1], axis=-2)


FAMILIES = {cls.family: cls for cls in (Weibull, Frechet, Beta, Bernoulli)}


def make_base(family, theta):
    """Build a base distribution from a family name and parameter vector."""
    try:
        cls = FAMILIES[family.lower()]
    except (KeyError, AttributeError):
        raise ParameterError(
            f"unknown family {family!r}; choose from {sorted(FAMILIES)}"
        ) from None
    return cls.from_theta(theta)


def inc_beta(x, a, b):
    """Regularised incomplete beta function ``I_x(a, b)``."""
    x = check_unit(x, "x")
    a, b = check_positive("a", a), check_positive("b", b)
    return _out(special.betainc(a, b, x))


def _fd_step(v, rel):
    # keeps v - 2h > 0 for the extrapolated stencils
    return min(rel * max(1.0, abs(v)), v / 4)


def inc_beta_partials(x, a, b):
    """Derivatives ``(dI/da, dI/db)`` of ``I_x(a, b)``.

    Central differences with one Richardson step, accurate to about 1e-12.
    """
    x = np.asarray(x, dtype=float)
    ha, hb = _fd_step(a, 1e-3), _fd_step(b, 1e-3)

    def da(h):
        return (special.betainc(a + h, b, x) - special.betainc(a - h, b, x)) / (2 * h)

    def db(h):
        return (special.betainc(a, b + h, x) - special.betainc(a, b - h, x)) / (2 * h)

    return _out((4 * da(ha) - da(2 * ha)) / 3), _out((4 * db(hb) - db(2 * hb)) / 3)


def beta_series_coeffs(a, b, K=None, tol=1e-12):
    """Power-series form of the beta cdf, ``I_x(a, b) = sum_k c_k x**(k + a)``.

    ``c_k = (-1)**k Gamma(a+b) / (Gamma(a) Gamma(b-k) k! (a+k))``, which
    is the termwise integral of the binomial series of ``(1-x)**(b-1)``.
    For integer ``b`` the series stops after ``b`` terms; otherwise ``K``
    terms are kept (default 200) and the tail at ``x = 0.9`` is estimated.
    """
    a, b = check_positive("a", a), check_positive("b", b)
    integer_b = float(b).is_integer()
    if K is None:
        K = int(b) if integer_b else 200
    K = int(K)
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    scale = math.exp(-special.betaln(a, b))
    coeffs, t = [], 1.0
    for k in range(K):
        if k > 0:
            t *= (k - b) / k
        coeffs.append(scale * t / (a + k))
    tail = 0.0
    if not (integer_b and K >= b):
        # successive |c_k| x^k shrink geometrically by about x at x = 0.9
        tail = abs(coeffs[-1]) * 0.9 ** (K - 1 + a) * 0.9 / 0.1
    return PowerSeries(coeffs, offset=a, tail_bound=tail, truncation_warning=tail > tol)
