"""Special functions needed on count data and binary channels."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .exceptions import DomainError

_ANCHOR = 20

# Bernoulli-number coefficients of the asymptotic expansion
#   psi(n) ~ ln n - 1/(2n) - sum_k B_2k / (2k n^2k)
# Truncation error at n >= 20 is below 1e-19.
_ASYMPTOTIC = (
    (2, -1.0 / 12.0),
    (4, 1.0 / 120.0),
    (6, -1.0 / 252.0),
    (8, 1.0 / 240.0),
    (10, -1.0 / 132.0),
    (12, 691.0 / 32760.0),
    (14, -1.0 / 12.0),
)


def _psi_asymptotic(n):
    n = np.asarray(n, dtype=float)
    inv2 = 1.0 / (n * n)
    # Horner in 1/n^2, highest order first
    acc = np.zeros_like(n)
    for _, coef in reversed(_ASYMPTOTIC):
        acc = (acc + coef) * inv2
    return np.log(n) - 0.5 / n + acc


def _small_table():
    anchor = float(_psi_asymptotic(_ANCHOR))
    table = np.empty(_ANCHOR + 1)
    table[0] = np.nan
    table[_ANCHOR] = anchor
    for k in range(_ANCHOR - 1, 0, -1):
        table[k] = table[k + 1] - 1.0 / k
    return table


_SMALL = _small_table()


@lru_cache(maxsize=4096)
def digamma_int(n: int) -> float:
    """Digamma function at a positive integer.

    Values below 20 come from downward recurrence off an asymptotic anchor
    at 20; larger arguments use the asymptotic series directly.
    """
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"digamma_int needs an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"digamma_int is defined for n >= 1, got {n}")
    if n <= _ANCHOR:
        return float(_SMALL[n])
    return float(_psi_asymptotic(n))


def digamma_counts(counts) -> np.ndarray:
    """Vectorized :func:`digamma_int` over an integer array of counts >= 1."""
    counts = np.asarray(counts)
    if counts.size and counts.min() < 1:
        raise DomainError("digamma_counts needs counts >= 1")
    out = np.empty(counts.shape, dtype=float)
    small = counts <= _ANCHOR
    out[small] = _SMALL[counts[small]]
    out[~small] = _psi_asymptotic(counts[~small])
    return out


def binary_symmetric_mi(u):
    """Mutual information (nats) of two fair bits with correlation ``u``.

    Joint law p(s, s') = (1 + u s s') / 4 on s, s' in {-1, +1}, which gives
    ((1+u) ln(1+u) + (1-u) ln(1-u)) / 2. For |u| < 1e-3 the even power
    series sum u^2k / (2k (2k-1)) is used to avoid cancellation.
    """
    u = np.abs(np.asarray(u, dtype=float))
    if np.any(u > 1.0):
        raise DomainError("correlation must lie in [-1, 1]")
    out = np.empty_like(u)
    small = u < 1e-3
    us = u[small] ** 2
    series = np.zeros_like(us)
    for k in range(6, 0, -1):
        series = us * (1.0 / (2 * k * (2 * k - 1)) + series)
    out[small] = series
    ub = u[~small]
    with np.errstate(divide="ignore", invalid="ignore"):
        # 0 * log 0 := 0 at perfect correlation
        tail = np.where(ub < 1.0, (1.0 - ub) * np.log1p(-ub), 0.0)
    out[~small] = 0.5 * ((1.0 + ub) * np.log1p(ub) + tail)
    if out.ndim == 0:
        return float(out)
    return out


LN2 = math.log(2.0)
