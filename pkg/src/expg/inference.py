"""Likelihood inference for exp-G models.

Per observation the log-density is ``log rate(lam) + log g(x) - lam G(x)``,
so every derivative splits into a part that depends on ``lam`` alone and
base-family derivatives of ``log g`` and ``G``. At ``lam = 0`` the same
expressions give the base likelihood, its score and the limiting
information without a separate code path.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ._validation import check_in_support, check_sample
from .base import FAMILIES, make_base
from .exceptions import (
    DataError,
    DomainError,
    FitError,
    ParameterError,
    QuadratureError,
    UnsupportedOperationError,
)
from .model import ExpGModel
from .quadrature import chi2_sf, expectation, normal_quantile, quantile_integral
from .transform import log_rate_constant, texp_information, texp_mean

LAMBDA_STARTS = (-10.0, -1.0, 0.0, 1.0, 10.0)
GRAD_TOL = 1e-6
INFO_TOL = 1e-10


# ----------------------------------------------------------------- data


def _values(model, data):
    """Validate observations for a continuous model."""
    if model.base.discrete:
        raise UnsupportedOperationError(
            f"likelihood inference is implemented for continuous bases, not {model.base.family}"
        )
    values = check_sample(getattr(data, "values", data), "data")
    if not np.all(np.isfinite(values)):
        idx = int(np.flatnonzero(~np.isfinite(values))[0])
        raise DataError(f"observation {idx} is not finite", index=idx)
    return check_in_support(values, model.base)


def _family_class(family):
    try:
        return FAMILIES[str(family).lower()]
    except KeyError:
        raise ParameterError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None


# ------------------------------------------------------- likelihood pieces


def loglik_terms(model, data):
    """Per-observation log-likelihood contributions."""
    x = _values(model, data)
    base = model.base
    return log_rate_constant(model.lam) + base._logpdf(x) - model.lam * base.cdf(x)


def loglik(model, data):
    """Total log-likelihood; equals the base log-likelihood at ``lam = 0``.

    Raises :class:`DataError` naming the first observation outside the support.
    """
    return float(np.sum(loglik_terms(model, data)))


def _score_parts(model, data):
    x = _values(model, data)
    base, lam = model.base, model.lam
    d_lam = texp_mean(lam) - base.cdf(x)
    d_theta = base._score(x) - lam * base._cdf_grad(x)
    return d_lam, d_theta


def score_terms(model, data):
    """Per-observation scores, shape ``(n, k + 1)``, ordered ``(lam, *theta)``.

    The ``lam`` component is ``E_lam{U} - G(x)``, with ``E_lam{U}`` the
    truncated-exponential mean; it is ``1/2 - G(x)`` at ``lam = 0``.
    """
    return np.column_stack(_score_parts(model, data))


def score(model, data):
    """Total score vector ``(d/d lam, d/d theta)``."""
    d_lam, d_theta = _score_parts(model, data)
    return np.concatenate([[np.sum(d_lam)], np.sum(d_theta, axis=0)])


def hessian(model, data):
    """Analytic Hessian of the total log-likelihood."""
    x = _values(model, data)
    base, lam = model.base, model.lam
    k = base.k
    H = np.empty((k + 1, k + 1))
    H[0, 0] = -x.size * texp_information(lam)
    cross = -base._cdf_grad(x).sum(axis=0)
    H[0, 1:] = H[1:, 0] = cross
    H[1:, 1:] = (base._logpdf_hessian(x) - lam * base._cdf_hessian(x)).sum(axis=0)
    return H


# ----------------------------------------------------------- information


def _info_integrand(base, k):
    def h(x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([
            base._cdf_grad(x).ravel(),
            base._cdf_hessian(x).ravel(),
            base._logpdf_hessian(x).ravel(),
        ])
    return h


def fisher_info(model, formula="generic", tol=INFO_TOL):
    """Unit (per-observation) Fisher information of ``(lam, *theta)``.

    Parameters
    ----------
    formula : {"generic", "closed-form"}
        ``generic`` uses ``k_ll = 1/lam^2 - e^lam/(e^lam-1)^2``,
        ``k_lt = E{dG/dtheta}`` and
        ``k_tt = lam E{d2G/dtheta2} - E{d2 log g/dtheta2}``, with the
        expectations integrated adaptively over the quantile scale. The
        ``closed-form`` option evaluates the published closed-form entries
        for the exp-Weibull and exp-beta models, kept for comparison only;
        several entries are wrong (see the tests) and they need ``lam != 0``.

    Raises
    ------
    QuadratureError
        If an expectation fails to converge; ``entries`` names the failures.
    """
    if model.base.discrete:
        raise UnsupportedOperationError("Fisher information needs a continuous base")
    if formula == "closed-form":
        return _printed_info(model, tol)
    if formula != "generic":
        raise ValueError(f"formula must be 'generic' or 'closed-form', got {formula!r}")
    base, lam, k = model.base, model.lam, model.base.k
    value, err, _, ok = quantile_integral(model, _info_integrand(base, k), tol=tol, rel_tol=tol)
    value = np.asarray(value)
    if not ok or not np.all(np.isfinite(value)):
        _raise_entry_failures(model, _info_integrand(base, k), k, tol)
    eg = value[:k]
    eHG = value[k:k + k * k].reshape(k, k)
    eHl = value[k + k * k:].reshape(k, k)
    K = np.empty((k + 1, k + 1))
    K[0, 0] = texp_information(lam)
    K[0, 1:] = K[1:, 0] = eg
    K[1:, 1:] = lam * eHG - eHl
    return 0.5 * (K + K.T)


def _raise_entry_failures(model, h, k, tol):
    names = model.param_names[1:]
    labels = [f"E dG/d{n}" for n in names]
    labels += [f"E d2G/d{a}d{b}" for a in names for b in names]
    labels += [f"E d2logg/d{a}d{b}" for a in names for b in names]
    failed = []
    for i, label in enumerate(labels):
        v, _, _, ok = quantile_integral(model, lambda x, i=i: float(h(x)[i]), tol=tol, rel_tol=tol)
        if not ok or not math.isfinite(v):
            failed.append(label)
    raise QuadratureError(
        "information integrals did not converge: " + (", ".join(failed) or "vector integral"),
        entries=failed,
    )


def _printed_info(model, tol):
    """Closed-form information entries as printed for exp-Weibull and exp-beta."""
    from scipy import special

    lam, base = model.lam, model.base
    if lam == 0.0:
        raise DomainError("the printed information entries divide by lambda; use formula='generic'")
    E = lambda h: expectation(model, h, tol, tol).value  # noqa: E731
    K = np.zeros((3, 3))
    K[0, 0] = texp_information(lam)
    if base.family == "weibull":
        a, b = base.alpha, base.beta
        z = lambda x: (x / b) ** a  # noqa: E731
        L = lambda x: math.log(x / b)  # noqa: E731
        e_logx = E(math.log)
        k_lb = a / (b * lam) * (E(z) - 1.0)
        k_la = (E(lambda x: z(x) * L(x)) - 1.0 / a + math.log(b) - e_logx) / lam
        k_bb = a / b**3 * (1.0 - a * lam * E(lambda x: math.exp(-z(x)) * z(x) ** 2))
        k_ba = a * (lam * E(lambda x: math.exp(-z(x)) * z(x) ** 2 * L(x)) - 1.0 / a + math.log(b) - e_logx)
        k_aa = 1.0 / a**2 + E(
            lambda x: z(x) * L(x) ** 2 * (1.0 - lam * math.exp(-z(x)) * z(x) + lam * math.exp(-z(x)))
        )
        # our parameter order is (lam, alpha, beta)
        K[0, 1], K[0, 2] = k_la, k_lb
        K[1, 1], K[1, 2], K[2, 2] = k_aa, k_ba, k_bb
    elif base.family == "beta":
        a, b = base.a, base.b
        tab = special.polygamma(1, a + b)
        d2 = lambda i, j: (lambda x: float(base._cdf_hessian(np.asarray(x))[i, j]))  # noqa: E731
        K[0, 1] = (special.digamma(a + b) - special.digamma(a) + E(math.log)) / lam
        K[0, 2] = (special.digamma(a + b) - special.digamma(b) + E(lambda x: math.log1p(-x))) / lam
        K[1, 1] = special.polygamma(1, a) - tab + lam * E(d2(0, 0))
        K[1, 2] = special.polygamma(1, b) - tab + lam * E(d2(1, 1))
        K[2, 2] = -tab + lam * E(d2(0, 1))
    else:
        raise UnsupportedOperationError(f"no printed information entries for {base.family}")
    return np.triu(K) + np.triu(K, 1).T


# ------------------------------------------------------------------ fit


@dataclass
class FitReport:
    """Result of a maximum likelihood fit.

    ``covariance`` is ``[n K(estimates)]^{-1}`` over the free parameters,
    padded with zero rows for fixed ones. ``ci`` holds ``(low, high)``
    per parameter; it is ``None`` when the information is singular.
    """

    family: str
    param_names: tuple
    estimates: np.ndarray
    loglik: float
    n: int
    converged: bool
    iterations: int
    grad_norm: float
    fixed: dict = field(default_factory=dict)
    info_matrix: np.ndarray = None
    covariance: np.ndarray = None
    std_errors: np.ndarray = None
    ci: list = None
    level: float = 0.95
    singular_info: bool = False
    message: str = ""
    starts: list = field(default_factory=list)

    @property
    def model(self):
        return ExpGModel.from_params(self.family, self.estimates)

    def as_dict(self):
        names = list(self.param_names)
        out = {
            "family": self.family,
            "n": int(self.n),
            "estimates": dict(zip(names, map(float, self.estimates))),
            "loglik": float(self.loglik),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "grad_norm": float(self.grad_norm),
            "fixed": {k: float(v) for k, v in self.fixed.items()},
            "level": float(self.level),
            "std_errors": None,
            "ci": None,
        }
        if self.std_errors is not None:
            out["std_errors"] = dict(zip(names, map(float, self.std_errors)))
        if self.ci is not None:
            out["ci"] = {n: [float(lo), float(hi)] for n, (lo, hi) in zip(names, self.ci)}
        if self.info_matrix is not None:
            out["info_matrix"] = np.asarray(self.info_matrix).tolist()
        if self.message:
            out["message"] = self.message
        return out


def base_mle(family, data, initial=None):
    """Maximum likelihood fit of the base family alone (``lam = 0``)."""
    return mle_fit(family, data, fix_lambda=0.0, with_covariance=False, initial=initial)


def _resolve_fixed(names, fix_lambda, fixed):
    out = dict(fixed or {})
    if fix_lambda is not None:
        out["lambda"] = float(fix_lambda)
    for name in out:
        if name not in names:
            raise ParameterError(f"cannot fix unknown parameter {name!r}; parameters are {names}")
    return out


def mle_fit(family, data, fix_lambda=None, level=0.95, fixed=None, with_covariance=True,
            initial=None, lambda_starts=LAMBDA_STARTS, maxiter=500):
    """Maximum likelihood fit of exp-G(lam, theta).

    Parameters
    ----------
    family : str
        Base family name.
    data : array-like or Dataset
        Observations inside the base support.
    fix_lambda : float, optional
        Pins ``lam``; ``0`` fits the base model through the same code.
    level : float
        Confidence level of the Wald intervals.
    fixed : dict, optional
        Further parameters to pin, by name.
    with_covariance : bool
        Skip the information integrals when False (used by simulations).
    initial : array-like, optional
        Starting ``theta``; defaults to the base-family fit.

    Returns
    -------
    FitReport
        ``converged`` is False, with the best point reached, when no start
        reaches a gradient norm of ``1e-6``.

    Notes
    -----
    BFGS runs on ``(lam, log theta)`` from each ``lam`` in ``lambda_starts``
    with ``theta`` at the base fit, then Newton steps with the analytic
    Hessian polish the best optimum.
    """
    cls = _family_class(family)
    if cls.discrete:
        raise UnsupportedOperationError(f"fitting is implemented for continuous bases, not {cls.family}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    x = check_sample(getattr(data, "values", data), "data")
    names = ("lambda",) + tuple(cls.param_names)
    fixed = _resolve_fixed(names, fix_lambda, fixed)
    k1 = len(names)
    if x.size < k1 + 1:
        raise DataError(f"need at least {k1 + 1} observations to fit {k1} parameters, got {x.size}")
    # supports do not depend on theta, so any valid member can check the data
    check_in_support(x, cls.from_theta(np.ones(len(cls.param_names))))

    free = np.array([n not in fixed for n in names])
    pos = np.array([False] + [True] * (k1 - 1))  # theta is log-transformed

    def full(u):
        p = np.empty(k1)
        p[free] = u
        for i, n in enumerate(names):
            if n in fixed:
                p[i] = fixed[n]
        return p

    def to_internal(p):
        q = np.where(pos, np.log(np.where(pos, p, 1.0)), p)
        return q[free]

    def to_params(u):
        q = full(np.zeros(free.sum()))
        q[free] = u
        p = np.where(pos, np.exp(np.where(pos, q, 0.0)), q)
        for i, n in enumerate(names):
            if n in fixed:
                p[i] = fixed[n]
        return p

    scale = 1.0 / x.size

    def objective(u):
        try:
            p = to_params(u)
            m = ExpGModel.from_params(cls.family, p)
            ll = loglik(m, x)
            g = score(m, x)
        except (ParameterError, DomainError, OverflowError, ValueError):
            return np.inf, np.zeros_like(u)
        if not np.isfinite(ll) or not np.all(np.isfinite(g)):
            return np.inf, np.zeros_like(u)
        g = np.where(pos, g * p, g)  # chain rule for log theta
        return -ll * scale, -g[free] * scale

    if fixed.get("lambda") == 0.0 and initial is None:
        theta0 = cls.initial_theta(x)
        lam_seeds = [0.0]
    else:
        if initial is None:
            theta0 = base_mle(cls.family, x).estimates[1:]
        else:
            theta0 = np.asarray(initial, dtype=float)
        lam_seeds = [fixed["lambda"]] if "lambda" in fixed else list(lambda_starts)

    starts = []
    for lam0 in lam_seeds:
        p0 = np.concatenate([[lam0], theta0])
        for i, n in enumerate(names):
            if n in fixed:
                p0[i] = fixed[n]
        with np.errstate(all="ignore"):
            res = optimize.minimize(objective, to_internal(p0), jac=True, method="BFGS",
                                    options={"gtol": 1e-10, "maxiter": maxiter})
        val = -res.fun / scale if np.isfinite(res.fun) else -np.inf
        starts.append({"lambda0": float(lam0), "loglik": float(val), "nit": int(res.nit),
                       "params": to_params(res.x)})
    best = max(starts, key=lambda s: s["loglik"])
    if not np.isfinite(best["loglik"]):
        raise FitError(f"the log-likelihood is not finite at any start for {cls.family}")

    p, newton_its = _newton_polish(cls.family, x, best["params"], free)
    m = ExpGModel.from_params(cls.family, p)
    ll = loglik(m, x)
    if ll < best["loglik"] - 1e-9:
        p, ll = best["params"], best["loglik"]
        m = ExpGModel.from_params(cls.family, p)
    g = score(m, x)[free]
    grad_norm = float(np.max(np.abs(g))) if g.size else 0.0
    converged = bool(grad_norm <= GRAD_TOL)

    report = FitReport(
        family=cls.family, param_names=names, estimates=p, loglik=float(ll), n=int(x.size),
        converged=converged, iterations=int(best["nit"] + newton_its), grad_norm=grad_norm,
        fixed=fixed, level=level,
        starts=[{"lambda0": s["lambda0"], "loglik": s["loglik"]} for s in starts],
    )
    if not converged:
        report.message = f"no start reached gradient norm {GRAD_TOL:g}; best point reported"
    if with_covariance:
        _attach_covariance(report, m, free)
    return report


def _newton_polish(family, x, p, free, max_steps=50):
    """Newton-Raphson on the free parameters with step halving."""
    p = np.array(p, dtype=float)
    if not free.any():
        return p, 0
    m = ExpGModel.from_params(family, p)
    ll = loglik(m, x)
    for it in range(max_steps):
        g = score(m, x)[free]
        if np.max(np.abs(g)) <= 0.01 * GRAD_TOL:
            return p, it
        H = hessian(m, x)[np.ix_(free, free)]
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            return p, it
        if not g @ step > 0:
            # not an ascent direction: fall back to scaled gradient
            step = g / max(1.0, np.max(np.abs(np.diag(H))))
        t = 1.0
        while t > 1e-8:
            q = p.copy()
            q[free] += t * step
            try:
                mq = ExpGModel.from_params(family, q)
                lq = loglik(mq, x)
            except (ParameterError, DomainError, ValueError):
                lq = -np.inf
            if np.isfinite(lq) and lq >= ll - 1e-12 * abs(ll):
                break
            t /= 2.0
        else:
            return p, it
        p, m, ll = q, mq, lq
    return p, max_steps


def _attach_covariance(report, model, free):
    n = report.n
    try:
        K = fisher_info(model)
    except QuadratureError as exc:
        report.singular_info = True
        report.message = (report.message + "; " if report.message else "") + str(exc)
        return
    report.info_matrix = K
    Kf = n * K[np.ix_(free, free)]
    ok = np.all(np.isfinite(Kf))
    if ok:
        eig = np.linalg.eigvalsh(Kf)
        ok = eig.min() > 1e-12 * max(1.0, eig.max())
    if not ok:
        report.singular_info = True
        report.message = (report.message + "; " if report.message else "") + \
            "information matrix is singular; intervals omitted"
        return
    cov = np.zeros((len(free), len(free)))
    cov[np.ix_(free, free)] = np.linalg.inv(Kf)
    cov = 0.5 * (cov + cov.T)
    report.covariance = cov
    report.std_errors = np.sqrt(np.diag(cov))
    z = normal_quantile(1.0 - (1.0 - report.level) / 2.0)
    report.ci = [(e - z * s, e + z * s) for e, s in zip(report.estimates, report.std_errors)]


# ---------------------------------------------------------------- tests


@dataclass(frozen=True)
class TestReport:
    """A likelihood-based test statistic with its chi-square tail probability."""

    __test__ = False  # not a pytest class

    kind: str
    statistic: float
    df: int
    p_value: float
    null: dict = field(default_factory=dict)

    def as_dict(self):
        return {"stat": self.kind.lower(), "value": float(self.statistic), "df": int(self.df),
                "p_value": float(self.p_value), "null": {k: float(v) for k, v in self.null.items()}}


def _null_dict(null):
    if null is None:
        return {"lambda": 0.0}
    if isinstance(null, dict):
        if not null:
            raise ParameterError("the null hypothesis must fix at least one parameter")
        return {k: float(v) for k, v in null.items()}
    return {"lambda": float(null)}


def _report(kind, stat, null):
    stat = max(float(stat), 0.0)
    df = len(null)
    return TestReport(kind, stat, df, chi2_sf(stat, df), null)


def _indices(names, null):
    return [names.index(k) for k in null]


def lr_test(family, data, null=None, full=None, restricted=None):
    """Likelihood-ratio test of ``H0: Theta_1 = Theta_1^0``.

    ``null`` maps parameter names to their values under H0; a bare number
    is taken as the value of ``lambda`` and the default is ``lambda = 0``.
    Precomputed fits may be passed as ``full`` and ``restricted``.
    """
    null = _null_dict(null)
    if full is None:
        full = mle_fit(family, data, with_covariance=False)
    if restricted is None:
        restricted = mle_fit(family, data, fixed=null, with_covariance=False)
    if full.fixed or not all(restricted.fixed.get(k) == v for k, v in null.items()):
        raise ParameterError("the LR test needs an unrestricted fit and a fit under the null")
    for fit in (full, restricted):
        if not fit.converged:
            raise FitError(f"{'full' if fit is full else 'restricted'} fit did not converge: {fit.message}")
    return _report("LR", 2.0 * (full.loglik - restricted.loglik), null)


def wald_test(family, data, null=None, full=None):
    """Wald test: ``(T1 - T1^0)' [K^{11}]^{-1} (T1 - T1^0)`` at the full MLE."""
    null = _null_dict(null)
    if full is None:
        full = mle_fit(family, data)
    if not full.converged:
        raise FitError(f"full fit did not converge: {full.message}")
    if full.info_matrix is None:
        full = mle_fit(family, data, initial=full.estimates[1:])
    idx = _indices(list(full.param_names), null)
    Kinv = np.linalg.inv(full.n * full.info_matrix)
    block = Kinv[np.ix_(idx, idx)]
    diff = full.estimates[idx] - np.array([null[k] for k in null])
    return _report("Wald", diff @ np.linalg.solve(block, diff), null)


def score_test(family, data, null=None, restricted=None):
    """Rao score test: ``U1' K^{11} U1`` at the restricted MLE.

    At ``lambda = 0`` the score component is ``sum(1/2 - G(x_i))`` and the
    information is the limiting one, with ``k_ll = 1/12``.
    """
    null = _null_dict(null)
    if restricted is None:
        restricted = mle_fit(family, data, fixed=null, with_covariance=False)
    if not restricted.converged:
        raise FitError(f"restricted fit did not converge: {restricted.message}")
    m = restricted.model
    x = check_sample(getattr(data, "values", data), "data")
    names = list(restricted.param_names)
    idx = _indices(names, null)
    U = score(m, x)
    Kinv = np.linalg.inv(x.size * fisher_info(m))
    U1 = U[idx]
    return _report("Score", U1 @ Kinv[np.ix_(idx, idx)] @ U1, null)


TESTS = {"lr": lr_test, "wald": wald_test, "score": score_test}


# ------------------------------------------------- modified profile fit


def _profile_pieces(base, x):
    a = base._cdf_grad(x)
    u = base._score(x)
    HG = base._cdf_hessian(x)
    Hl = base._logpdf_hessian(x)
    return a, u, HG, Hl


def lambda_breve(base, data, variant="exact", pooled=False):
    """Plug-in ``lam(theta) = (G_t . U*) / (G_t . G_t)`` and its gradient.

    Parameters
    ----------
    variant : {"exact", "printed"}
        ``exact`` differentiates the ratio in full. ``printed`` keeps only
        the diagonals of the Hessians of ``G`` and ``log g``, elementwise.
    pooled : bool
        Form the ratio from sample totals of ``G_t`` and ``U*`` instead of
        one ratio per observation.

    Returns
    -------
    lam : ndarray, shape (n,) or (1,) when pooled
    dlam : ndarray, shape (n, k) or (1, k)
    """
    x = check_sample(getattr(data, "values", data), "data")
    a, u, HG, Hl = _profile_pieces(base, x)
    if pooled:
        a, u, HG, Hl = (t.sum(axis=0, keepdims=True) for t in (a, u, HG, Hl))
    D = np.einsum("ni,ni->n", a, a)
    N = np.einsum("ni,ni->n", a, u)
    bad = ~(D > 0) | ~np.isfinite(D) | ~np.isfinite(N)
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0])
        where = "in the pooled sums" if pooled else f"at observation {idx}"
        raise DomainError(f"dG/dtheta vanishes {where}; the plug-in lambda is singular")
    lam = N / D
    if variant == "exact":
        dD = 2.0 * np.einsum("nij,ni->nj", HG, a)
        dN = np.einsum("nij,ni->nj", HG, u) + np.einsum("nij,ni->nj", Hl, a)
    elif variant == "printed":
        hg = np.diagonal(HG, axis1=1, axis2=2)
        hl = np.diagonal(Hl, axis1=1, axis2=2)
        dD = 2.0 * hg * a
        dN = hg * u + a * hl
    else:
        raise ValueError(f"variant must be 'exact' or 'printed', got {variant!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        dlam = (dN / D[:, None]) - (N / D)[:, None] * (dD / D[:, None])
    if not np.all(np.isfinite(lam)) or not np.all(np.isfinite(dlam)):
        raise DomainError("the plug-in lambda or its gradient overflowed")
    return lam, dlam


def _texp_mean_vec(lam):
    return np.array([texp_mean(v) for v in np.ravel(lam)])


def _log_rate_vec(lam):
    return np.array([log_rate_constant(v) for v in np.ravel(lam)])


def modified_profile_loglik(base, data, pooled=False):
    """``sum_i [log rate(l) + log g(x_i) - l G(x_i)]`` with ``l`` the plug-in lambda."""
    x = check_in_support(check_sample(getattr(data, "values", data), "data"), base)
    lam, _ = lambda_breve(base, x, pooled=pooled)
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.sum(_log_rate_vec(lam) + base._logpdf(x) - lam * base.cdf(x)))


def modified_profile_equation(base, data, variant="exact", pooled=False):
    """Estimating function ``V_n(theta)``.

    Each observation contributes
    ``(E_l{U} - G) dl/dtheta + U* - l dG/dtheta`` with ``l`` the plug-in
    lambda and ``E_l{U} = 1/l - 1/(e^l - 1)``. With the exact variant this
    is the gradient of :func:`modified_profile_loglik`.
    """
    x = check_in_support(check_sample(getattr(data, "values", data), "data"), base)
    lam, dlam = lambda_breve(base, x, variant, pooled)
    G = base.cdf(x)
    with np.errstate(over="ignore", invalid="ignore"):
        V = (_texp_mean_vec(lam)[:, None] - G[:, None]) * dlam + base._score(x) \
            - lam[:, None] * base._cdf_grad(x)
    return V.sum(axis=0)


def modified_profile_fit(family, data, variant="exact", pooled=False, initial=None, compare=True):
    """Solve ``V_n(theta) = 0`` for the modified profile estimate of ``theta``.

    The root is sought in ``log theta`` from the base-family fit. With
    ``compare`` the theta part of the full MLE is stored in
    ``report.starts`` for side-by-side reporting. With ``pooled`` the
    full MLE solves ``V_n = 0`` exactly, because the pooled plug-in then
    equals the fitted ``lam``.

    Returns
    -------
    FitReport
        ``estimates`` holds ``theta`` only; ``loglik`` is the modified
        profile log-likelihood and ``grad_norm`` the max-norm of ``V_n``.
        ``converged`` is False when no root was found.
    """
    cls = _family_class(family)
    x = check_sample(getattr(data, "values", data), "data")
    theta0 = base_mle(cls.family, x).estimates[1:] if initial is None else np.asarray(initial, float)
    check_in_support(x, cls.from_theta(theta0))

    def eq(v):
        th = np.exp(v)
        try:
            V = modified_profile_equation(cls.from_theta(th), x, variant, pooled)
        except (ParameterError, DomainError):
            return np.full(v.size, 1e300)
        return V * th / x.size

    with np.errstate(all="ignore"):
        sol = optimize.root(eq, np.log(theta0), method="hybr", tol=1e-14)
        if not np.all(np.abs(eq(sol.x)) * x.size <= GRAD_TOL):
            alt = optimize.root(eq, np.log(theta0), method="lm", tol=1e-14)
            if np.max(np.abs(eq(alt.x))) < np.max(np.abs(eq(sol.x))):
                sol = alt
    theta = np.exp(sol.x)
    base = cls.from_theta(theta)
    try:
        V = modified_profile_equation(base, x, variant, pooled)
        ll = modified_profile_loglik(base, x, pooled)
        lam, _ = lambda_breve(base, x, pooled=pooled)
    except DomainError as exc:
        raise FitError(f"modified profile solve left the regular region: {exc}") from exc
    grad_norm = float(np.max(np.abs(V)))
    report = FitReport(
        family=cls.family, param_names=tuple(cls.param_names), estimates=theta, loglik=ll,
        n=int(x.size), converged=bool(grad_norm <= GRAD_TOL), iterations=int(sol.get("nfev", 0)),
        grad_norm=grad_norm,
    )
    report.starts = [{"lambda_breve_mean": float(np.mean(lam))}]
    if not report.converged:
        report.message = f"no root of V_n found; best max|V_n| = {grad_norm:.3g}"
    if compare:
        full = mle_fit(cls.family, x, with_covariance=False)
        report.starts.append({"mle_theta": dict(zip(cls.param_names, map(float, full.estimates[1:])))})
    return report


__all__ = [
    "FitReport", "TestReport", "TESTS", "base_mle", "fisher_info", "hessian", "lambda_breve",
    "loglik", "loglik_terms", "lr_test", "mle_fit", "modified_profile_equation",
    "modified_profile_fit", "modified_profile_loglik", "score", "score_terms", "score_test",
    "wald_test",
]
