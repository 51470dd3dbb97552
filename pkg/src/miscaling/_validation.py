"""Input validation helpers shared by the estimators and generators."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DomainError, ParameterError


def check_random_seed(seed) -> int:
    """Return ``seed`` as a non-negative 64-bit integer."""
    if seed is None:
        raise ParameterError("an explicit integer seed is required")
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_lags(lags) -> np.ndarray:
    """Validate a lag list: non-empty, positive integers, strictly increasing
    after sorting and de-duplication."""
    arr = np.asarray(lags)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("lag list must be a non-empty 1-d sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise DomainError("lags must be integers")
        arr = arr.astype(np.int64)
    if arr.min() < 1:
        raise DomainError("lags must be positive")
    return np.unique(arr.astype(np.int64))


def check_symbols(symbols, vocab_size: int | None = None) -> np.ndarray:
    """Return ``symbols`` as a 1-d int64 array of ids in ``[0, vocab_size)``."""
    arr = np.asarray(symbols)
    if arr.ndim != 1:
        raise DomainError("a symbol sequence must be 1-d")
    if arr.size == 0:
        raise DomainError("a symbol sequence must contain at least one symbol")
    if not np.issubdtype(arr.dtype, np.integer):
        if arr.dtype == bool:
            arr = arr.astype(np.int64)
        else:
            raise DomainError(f"symbols must be integer ids, got dtype {arr.dtype}")
    arr = arr.astype(np.int64, copy=False)
    if arr.min() < 0:
        raise DomainError("symbol ids must be non-negative")
    if vocab_size is not None and arr.max() >= vocab_size:
        raise DomainError(
            f"symbol id {int(arr.max())} out of range for vocab_size={vocab_size}"
        )
    return arr


def check_xy_curve(tau, mi):
    """Validate paired lag/MI arrays for curve fitting."""
    tau = np.asarray(tau, dtype=float)
    if tau.ndim == 2 and tau.shape[1] == 1:
        tau = tau[:, 0]
    mi = np.asarray(mi, dtype=float)
    if tau.ndim != 1 or mi.ndim != 1 or tau.shape != mi.shape:
        raise DomainError("lags and MI values must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(mi))):
        raise DomainError("lags and MI values must be finite")
    return tau, mi


def check_square(mat, name: str, size: int | None = None) -> np.ndarray:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ParameterError(f"{name} must be a square matrix, got shape {mat.shape}")
    if size is not None and mat.shape[0] != size:
        raise ParameterError(f"{name} must be {size}x{size}, got {mat.shape}")
    return mat
