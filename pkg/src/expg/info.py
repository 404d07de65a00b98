"""Entropy and Kullback-Leibler divergences of exp-G distributions.

The density ratio ``f/g = rate(lam) exp(-lam G(x))`` depends on ``x`` only
through ``G(x)``, which is uniform under the base and truncated
exponential under the exp-G law. Both directed divergences and the
constraint ``E{G(X)}`` therefore depend on ``lam`` alone.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .exceptions import UnsupportedOperationError
from .quadrature import expectation, graded_rule, quantile_integral
from .transform import log_rate_constant, rate_constant, texp_mean

DIRECTIONS = ("G_vs_expG", "expG_vs_G")


@dataclass(frozen=True)
class DivergenceResult:
    """A directed divergence with its quadrature cross-check."""

    direction: str
    closed_form: float
    quadrature_value: float
    discrepancy: float

    def __float__(self):
        return float(self.closed_form)


def kl_base_to_expg(lam):
    """``D(mu || mu_lam) = lam/2 - log rate(lam)``."""
    lam = float(lam)
    if abs(lam) < 1e-2:
        l2 = lam * lam
        return l2 / 24.0 - l2 * l2 / 2880.0 + l2**3 / 181440.0 - l2**4 / 9676800.0
    return lam / 2.0 - log_rate_constant(lam)


def kl_expg_to_base(lam):
    """``D(mu_lam || mu) = log rate(lam) - 1 + lam/(e^lam - 1)``."""
    lam = float(lam)
    if abs(lam) < 1e-2:
        l2 = lam * lam
        return l2 / 24.0 - l2 * l2 / 960.0 + l2**3 / 36288.0 - l2**4 / 1382400.0
    # lam / (e^lam - 1) is rate(-lam)
    return log_rate_constant(lam) - 1.0 + rate_constant(-lam)


def texp_entropy(lam):
    """Shannon entropy of the truncated exponential on [0, 1].

    ``1 - lam/(e^lam - 1) - log rate(lam)``; never positive, and equal to
    ``-D(mu_lam || mu)``.
    """
    return -kl_expg_to_base(lam)


def kl_divergence(model, direction="expG_vs_G", tol=1e-12):
    """Directed divergence between the base and the exp-G law.

    Parameters
    ----------
    direction : {"G_vs_expG", "expG_vs_G"}
        ``G_vs_expG`` is ``D(mu || mu_lam)`` with the base first.

    Returns
    -------
    DivergenceResult
        The closed form and an x-space quadrature of the log density ratio.
    """
    if model.base.discrete:
        raise UnsupportedOperationError("divergences are implemented for continuous bases only")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    base = model.base
    if direction == "G_vs_expG":
        closed = kl_base_to_expg(model.lam)
        # integrate against g: the exp-G law with lam = 0
        quad = expectation(model.with_lambda(0.0), lambda x: base.logpdf(x) - model.logpdf(x), tol, tol)
    else:
        closed = kl_expg_to_base(model.lam)
        quad = expectation(model, lambda x: model.logpdf(x) - base.logpdf(x), tol, tol)
    return DivergenceResult(direction, closed, quad.value, abs(closed - quad.value))


def constraint_expectations(model):
    """``(C1, C2) = (E{log g(X)}, E{G(X)})`` under the exp-G law.

    ``C2`` is closed-form; ``C1`` is integrated in probability space,
    where ``X = G^{-1}(U)`` with ``U`` truncated exponential.
    """
    if model.base.discrete:
        raise UnsupportedOperationError("constraints are defined for continuous bases only")
    base = model.base
    c1, _, _, ok = quantile_integral(model, base._logpdf, tol=1e-12)
    if not ok or not math.isfinite(c1):
        raise ArithmeticError("the E{log g(X)} integral did not converge")
    return c1, texp_mean(model.lam)


def shannon_entropy(model):
    """``H = 1 - lam/(e^lam - 1) - log rate(lam) - E{log g(X)}``."""
    c1, _ = constraint_expectations(model)
    return texp_entropy(model.lam) - c1


def entropy_quadrature(model, tol=1e-12):
    """``-int f log f`` by direct quadrature against the density."""
    return -expectation(model, model.logpdf, tol, tol).value


# ----------------------------------------------------- max-entropy check


@dataclass
class MaxEntReport:
    """Outcome of :func:`maxent_dominance_check`.

    ``excess[i]`` is ``H(perturbed_i) - H(f)``; dominance holds when every
    entry is at most ``margin``.
    """

    entropy: float
    perturbed_entropies: list = field(default_factory=list)
    constraint_residuals: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    margin: float = 1e-7

    @property
    def excess(self):
        return [h - self.entropy for h in self.perturbed_entropies]

    @property
    def dominated(self):
        return all(e <= self.margin for e in self.excess)


def _tilt_moments(L, u, w, lam, t, phi):
    """Unnormalised ``int_0^1 v(u) [1, L, u, phi] du`` for the tilt
    ``v = exp(t1 L + (t2 - lam) u + phi)``, on the base probability scale."""
    v = w * np.exp(t[0] * L + (t[1] - lam) * u + phi)
    return np.array([v.sum(), v @ L, v @ u, v @ phi])


def maxent_dominance_check(model, n_tilts=10, scale=0.5, seed=0, margin=1e-7):
    """Test that the exp-G density maximises entropy under its constraints.

    Each perturbation multiplies ``f`` by ``exp(phi(G(x)) + t1 log g(x) + t2 G(x))``,
    with ``phi`` a random combination of Legendre polynomials of degree 2
    to 4 in ``G(x)``. ``(t1, t2)`` is then solved so the perturbed density
    has the same ``E{log g}`` and ``E{G}`` as ``f``. ``n_tilts=0`` checks
    ``f`` against itself.
    """
    if model.base.discrete:
        raise UnsupportedOperationError("entropy is defined for continuous bases only")
    base, lam = model.base, model.lam
    u, s, w = graded_rule()
    half = u < 0.5
    x = np.where(half, base.ppf(np.where(half, u, 0.5)), base.isf(np.where(half, 0.5, s)))
    L = base._logpdf(x)

    c1, c2 = constraint_expectations(model)
    h_f = texp_entropy(lam) - c1
    report = MaxEntReport(h_f, margin=margin)
    rng = np.random.default_rng(seed)
    directions = [np.zeros(3)] if n_tilts == 0 else [rng.normal(size=3) * scale for _ in range(n_tilts)]

    for idx, coef in enumerate(directions):
        leg = np.polynomial.legendre.Legendre(np.concatenate([[0.0, 0.0], coef]))
        phi = leg(2.0 * u - 1.0)

        def residual(t):
            z, el, eu, _ = _tilt_moments(L, u, w, lam, t, phi)
            return [el / z - c1, eu / z - c2]

        t = np.zeros(2)
        res = np.abs(residual(t))
        for method in ("hybr", "lm"):
            if res.max() <= 1e-10:
                break
            sol = optimize.root(residual, x0=[0.0, 0.0], method=method, tol=1e-12)
            if np.all(np.isfinite(sol.x)):
                t, res = sol.x, np.abs(residual(sol.x))
        if not res.max() <= 1e-6:
            report.skipped.append((idx, "constraint solve failed"))
            continue
        t1, t2 = t
        z, el, eu, ep = _tilt_moments(L, u, w, lam, t, phi)
        # density on the x scale is g^(1+t1) exp((t2-lam) G + phi) / Z
        h = -((1.0 + t1) * el + (t2 - lam) * eu + ep) / z + math.log(z)
        report.perturbed_entropies.append(h)
        report.constraint_residuals.append(float(res.max()))
    return report
