"""Input validation helpers shared by the numerical layers."""

import math

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DataError, DomainError, ParameterError

UNIT_CLAMP = 1e-12


def check_lambda(lam):
    """Return ``lam`` as a finite float, rejecting NaN and infinities."""
    try:
        value = float(lam)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"lambda must be a real number, got {lam!r}") from exc
    if not math.isfinite(value):
        raise ParameterError(f"lambda must be finite, got {value}")
    return value


def check_positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a finite positive number, got {value}")
    return value


def check_unit(x, name="x"):
    """Validate values on [0, 1].

    Values within ``UNIT_CLAMP`` of the interval are clamped onto it;
    anything further out raises :class:`DomainError`.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError(f"{name} contains NaN")
    if np.any(arr < -UNIT_CLAMP) or np.any(arr > 1 + UNIT_CLAMP):
        bad = arr[(arr < -UNIT_CLAMP) | (arr > 1 + UNIT_CLAMP)].ravel()[0]
        raise DomainError(f"{name} must lie in [0, 1], got {bad}")
    return np.clip(arr, 0.0, 1.0)


def check_sample(X, name="X"):
    """Coerce observations to a 1-D float array.

    Accepts a flat sequence or a single-column 2-D array, the layout
    scikit-learn estimators receive.
    """
    arr = check_array(X, ensure_2d=False, dtype=float, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DataError(
                f"{name} must be one-dimensional or have a single column, "
                f"got shape {arr.shape}"
            )
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DataError("no observations")
    return arr


def check_in_support(values, base):
    """Raise :class:`DataError` naming the first observation outside the support."""
    lo, hi = base.support
    if base.discrete:
        ok = np.isin(values, base.support_points)
    else:
        ok = (values > lo) & (values < hi)
    if not np.all(ok):
        idx = int(np.flatnonzero(~ok)[0])
        raise DataError(
            f"observation {idx} (value {values[idx]!r}) lies outside the "
            f"support of the {base.family} family",
            index=idx,
        )
    return values
