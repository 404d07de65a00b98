"""Truncated power series ``sum_k a_k x**(k + c)`` and their integer powers."""

from dataclasses import dataclass


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to sum an infinite series.

    Summation stops once a term falls below ``rel_tol`` times the running
    total, or after ``max_terms`` terms.
    """

    rel_tol: float = 1e-12
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_terms) < 1:
            raise ValueError(f"max_terms must be at least 1, got {self.max_terms}")


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients of ``sum_{k<K} coeffs[k] * x**(k + offset)``.

    ``coeffs`` may hold floats, :class:`fractions.Fraction` or mpmath
    numbers; :func:`power_coeffs` keeps whatever type it is given.
    ``tail_bound`` is an estimate of the neglected tail at ``x = 0.9``
    when the series was cut short, and ``truncation_warning`` flags that
    estimate exceeding the requested tolerance.
    """

    coeffs: tuple
    offset: float = 0.0
    tail_bound: float = 0.0
    truncation_warning: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) < 1:
            raise ValueError("a power series needs at least one coefficient")

    @property
    def K(self):
        return len(self.coeffs)

    def __call__(self, x):
        total = 0.0
        for k in reversed(range(self.K)):
            total = total * x + float(self.coeffs[k])
        return total * x**self.offset


def power_recurrence(a, n, K):
    """First ``K`` coefficients of ``(sum_k a[k] x**k) ** n``.

    Uses ``c_0 = a_0**n`` and
    ``c_m = 1/(m a_0) * sum_{k=1}^{m} (n k - m + k) a_k c_{m-k}``.
    Entries of ``a`` beyond its length are taken as zero.
    """
    if a[0] == 0:
        raise ValueError(
            "leading coefficient is zero; factor out the leading power of x first"
        )
    n = int(n)
    if n < 0:
        raise ValueError(f"power must be a non-negative integer, got {n}")
    c = [a[0] ** n]
    for m in range(1, K):
        acc = 0 * a[0]
        for k in range(1, min(m, len(a) - 1) + 1):
            if a[k]:
                acc += (n * k - m + k) * a[k] * c[m - k]
        c.append(acc / (m * a[0]))
    return c


def power_coeffs(s, n, K=None):
    """Raise a power series to the positive integer power ``n``.

    The result keeps ``K`` coefficients (default: the input's length) and
    carries offset ``n * s.offset``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    K = s.K if K is None else int(K)
    coeffs = power_recurrence(s.coeffs, int(n), K)
    return PowerSeries(coeffs, offset=n * s.offset)
