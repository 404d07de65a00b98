"""Datasets: a validated sample container, CSV ingestion and the fatigue-life data."""

import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError

# Fatigue lives (thousands of cycles) of 6061-T6 aluminium coupons at a
# maximum stress of 31,000 psi, Birnbaum and Saunders (1969). The source
# text announces 101 observations but lists the 100 below.
FATIGUE_VALUES = (
    70, 90, 96, 97, 99, 100, 103, 104, 104, 105, 107, 108, 108, 108, 109, 109,
    112, 112, 113, 114, 114, 114, 116, 119, 120, 120, 120, 121, 121, 123, 124,
    124, 124, 124, 124, 128, 128, 129, 129, 130, 130, 130, 131, 131, 131, 131,
    131, 132, 132, 132, 133, 134, 134, 134, 134, 136, 136, 137, 138, 138, 138,
    139, 139, 141, 141, 142, 142, 142, 142, 142, 142, 144, 144, 145, 146, 148,
    148, 149, 151, 151, 152, 155, 156, 157, 157, 157, 157, 158, 159, 162, 163,
    163, 164, 166, 166, 168, 170, 174, 201, 212,
)
FATIGUE_ANNOUNCED_N = 101


@dataclass(frozen=True)
class Dataset:
    """A one-dimensional sample of finite reals."""

    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise DataError("no observations")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(f"observation {int(bad[0])} is not finite", index=int(bad[0]))
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return int(self.values.size)

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def load_csv(path):
    """Read observations from a CSV file.

    Values may sit one per line or comma-separated; blank lines and
    ``#`` comments are skipped.

    Raises
    ------
    OSError
        If the file cannot be read.
    DataError
        On a non-numeric token (the message names the line) or an empty file.
    """
    values = []
    with open(path, newline="") as fh:
        lines = [line.split("#", 1)[0] for line in fh]
    for lineno, row in enumerate(csv.reader(lines), start=1):
        for token in (t.strip() for t in row):
            if not token:
                continue
            try:
                values.append(float(token))
            except ValueError:
                raise DataError(f"line {lineno}: non-numeric token {token!r}") from None
    if not values:
        raise DataError(f"no observations in {path}")
    return Dataset(np.array(values), source=str(path))


def fatigue():
    """The embedded fatigue-life sample, sorted, with ``n = 100``."""
    return Dataset(np.sort(np.array(FATIGUE_VALUES, dtype=float)), source="embedded fatigue data")


__all__ = ["Dataset", "FATIGUE_ANNOUNCED_N", "FATIGUE_VALUES", "fatigue", "load_csv"]
