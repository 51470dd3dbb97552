"""Sequence generators whose auto-mutual information is known in closed form.

* The repetitive pair process emits "01" with probability p and "10"
  otherwise, one pair per period. Its MI is the same at every lag > 1.
* The nearest-neighbour Ising chain is sampled spin by spin from
  p(s_t | s_{t-1}) = exp(-bJ s_{t-1} s_t) / (2 cosh(bJ s_{t-1})), a two-state
  Markov chain whose MI decays exponentially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._special import LN2, binary_symmetric_mi
from ._validation import check_positive_int, check_random_seed
from .estimation import SymbolSequence
from .exceptions import DomainError, ParameterError

__all__ = [
    "RepetitiveParams",
    "IsingParams",
    "gen_repetitive",
    "mi_repetitive",
    "gen_ising",
    "mi_ising",
    "ising_spin_correlation",
]


@dataclass(frozen=True)
class RepetitiveParams:
    p: float
    length: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")
        check_positive_int(self.length, "length")


@dataclass(frozen=True)
class IsingParams:
    coupling: float  # beta * J
    length: int

    def __post_init__(self):
        if math.isnan(self.coupling):
            raise ParameterError("coupling must be a real number")
        check_positive_int(self.length, "length")


def gen_repetitive(params: RepetitiveParams, seed) -> SymbolSequence:
    if params.length % 2:
        raise DomainError(f"length must be even, got {params.length}")
    rng = np.random.default_rng(check_random_seed(seed))
    first_is_zero = rng.random(params.length // 2) < params.p
    pairs = np.empty((params.length // 2, 2), dtype=np.int64)
    pairs[:, 0] = np.where(first_is_zero, 0, 1)
    pairs[:, 1] = 1 - pairs[:, 0]
    return SymbolSequence(pairs.ravel(), 2)


def mi_repetitive(p: float) -> float:
    """Lag-independent MI (nats) of the repetitive process for lags > 1:
    4p(p-1) artanh[(1-2p)^2] + ln[2 + 4p(p-1)].

    With q = 4p(p-1) one has 1 - (1-2p)^2 = -q, so the artanh is expanded
    into logarithms and the value is computed as
    (1 + q/2) ln(2 + q) - (q/2) ln(-q), which stays accurate as p -> 0, 1.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    q = 4.0 * p * (p - 1.0)
    if q == 0.0:
        return LN2
    return (1.0 + 0.5 * q) * math.log(2.0 + q) - 0.5 * q * math.log(-q)


def gen_ising(params: IsingParams, seed) -> SymbolSequence:
    """Sample a chain of spins, coded -1 -> 0 and +1 -> 1."""
    rng = np.random.default_rng(check_random_seed(seed))
    n = params.length
    # probability that s_t equals s_{t-1}: e^{-bJ} / (2 cosh bJ)
    p_same = expit(-2.0 * params.coupling)
    first = rng.integers(0, 2)
    flips = rng.random(n - 1) >= p_same
    bits = np.empty(n, dtype=np.int64)
    bits[0] = first
    bits[1:] = (first + np.cumsum(flips)) % 2
    return SymbolSequence(bits, 2)


def ising_spin_correlation(coupling: float, tau) -> np.ndarray:
    """<s_t s_{t+tau}> = (-tanh bJ)^tau."""
    tau = np.asarray(tau)
    out = (-math.tanh(coupling)) ** tau.astype(float)
    return float(out) if out.ndim == 0 else out


def mi_ising(coupling: float, tau) -> float:
    """Exact MI (nats) between spins ``tau`` apart.

    The chain is stationary with fair marginals, and the joint law is
    p(s, s') = (1 + c s s') / 4 with c = (-tanh bJ)^tau.
    """
    if not math.isfinite(coupling):
        raise DomainError("coupling must be finite")
    tau = np.asarray(tau)
    if np.any(tau < 1):
        raise DomainError("tau must be positive")
    return binary_symmetric_mi(ising_spin_correlation(coupling, tau))
