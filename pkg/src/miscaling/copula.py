"""Binary sequences with designed auto-mutual information.

A zero-mean Gaussian vector with unit variances and Toeplitz covariance is
thresholded at zero. For two coordinates with correlation c = cos(theta) the
sign bits have mutual information

    I(theta) = [pi ln(2/pi) + (pi - theta) ln(pi - theta) + theta ln theta] / pi,

so choosing c(d) as a function of the distance d sets I(d).
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from ._special import LN2, binary_symmetric_mi
from ._validation import check_positive_int, check_random_seed
from .estimation import Corpus
from .exceptions import DomainError, NumericalError, ParameterError

logger = logging.getLogger(__name__)

__all__ = [
    "MODES",
    "EXACT_CAP",
    "ToeplitzCovariance",
    "mi_of_theta",
    "theta_of_mi",
    "small_c_mi",
    "build_covariance",
    "sample_gaussian",
    "sample_binary",
    "make_copula_corpus",
]

MODES = ("approx", "exact")
EXACT_CAP = LN2 - 1e-6
EIG_FLOOR = 1e-10
HALF_PI = 0.5 * math.pi


def mi_of_theta(theta):
    """Mutual information (nats) of sign bits of two unit Gaussians at angle
    ``theta`` in [0, pi/2], i.e. correlation cos(theta).

    Evaluated as ln 2 - h(theta/pi) with h the binary entropy, which is the
    same function written without the cancellation near pi/2.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(theta < 0.0) or np.any(theta > HALF_PI):
        raise DomainError("theta must lie in [0, pi/2]")
    return binary_symmetric_mi(1.0 - theta / HALF_PI)


def theta_of_mi(target, max_iter: int = 200):
    """Invert :func:`mi_of_theta` by bisection; ``target`` in [0, ln 2]."""
    target = np.asarray(target, dtype=float)
    scalar = target.ndim == 0
    target = np.atleast_1d(target)
    if np.any(~np.isfinite(target)) or np.any(target < 0.0) or np.any(target > LN2):
        raise DomainError("target mutual information must lie in [0, ln 2]")
    lo = np.zeros_like(target)
    hi = np.full_like(target, HALF_PI)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        above = mi_of_theta(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    err_lo = np.abs(mi_of_theta(lo) - target)
    err_hi = np.abs(mi_of_theta(hi) - target)
    theta = np.where(err_lo <= err_hi, lo, hi)
    theta = np.where(target == LN2, 0.0, theta)
    theta = np.where(target == 0.0, HALF_PI, theta)
    return float(theta[0]) if scalar else theta


def small_c_mi(c):
    """Leading small-correlation behaviour 2 c^2 / pi^2 of the sign-bit MI."""
    c = np.asarray(c, dtype=float)
    out = 2.0 * c * c / math.pi**2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ToeplitzCovariance:
    """Unit-diagonal Toeplitz covariance of the latent Gaussian.

    ``first_row[d]`` is the correlation at distance ``d``; ``first_row[0]``
    is 1. The lower Cholesky factor is computed lazily by :meth:`factor`.
    """

    length: int
    amplitude: float
    power: float
    mode: str
    first_row: np.ndarray
    _factor: dict = field(default=None, init=False, repr=False)

    def entry(self, d: int) -> float:
        return float(self.first_row[abs(int(d))])

    def matrix(self) -> np.ndarray:
        return toeplitz(self.first_row)

    def factor(self) -> np.ndarray:
        """Lower-triangular L with L L^T equal to the (possibly repaired)
        covariance."""
        if self._factor is None:
            object.__setattr__(self, "_factor", _factorize(self.matrix()))
        return self._factor["L"]

    @property
    def repaired(self) -> bool:
        self.factor()
        return self._factor["repaired"]

    @property
    def clipped_mass(self) -> float:
        self.factor()
        return self._factor["clipped_mass"]


def _factorize(mat: np.ndarray) -> dict:
    try:
        L = np.linalg.cholesky(mat)
        logger.info("covariance n=%d factorized without repair", mat.shape[0])
        return {"L": L, "repaired": False, "clipped_mass": 0.0}
    except np.linalg.LinAlgError:
        pass
    w, Q = np.linalg.eigh(mat)
    low = w < EIG_FLOOR
    clipped = float(np.sum(EIG_FLOOR - w[low]))
    fixed = (Q * np.maximum(w, EIG_FLOOR)) @ Q.T
    scale = 1.0 / np.sqrt(np.diag(fixed))
    fixed = fixed * scale[:, None] * scale[None, :]
    fixed = 0.5 * (fixed + fixed.T)
    msg = (
        f"covariance n={mat.shape[0]} is not positive definite "
        f"(min eigenvalue {w[0]:.3e}); clipped {int(low.sum())} eigenvalues, "
        f"mass {clipped:.3e}"
    )
    logger.warning(msg)
    warnings.warn(msg, RuntimeWarning, stacklevel=3)
    try:
        L = np.linalg.cholesky(fixed)
    except np.linalg.LinAlgError:
        raise NumericalError(
            f"factorization failed after repair; most negative eigenvalue {w[0]:.6e}"
        ) from None
    return {"L": L, "repaired": True, "clipped_mass": clipped}


def build_covariance(amplitude, power, length, mode="approx") -> ToeplitzCovariance:
    """Design the latent covariance for I(d) ~ amplitude * d**-power.

    ``mode="approx"`` uses c(d) = sqrt(A/2) pi d^(-power/2), which is exact
    only asymptotically. ``mode="exact"`` inverts the sign-bit MI formula so
    that I(d) = min(A d^-power, ln 2 - 1e-6) at every distance.
    """
    amplitude = float(amplitude)
    power = float(power)
    length = check_positive_int(length, "length", minimum=2)
    if not (amplitude > 0 and math.isfinite(amplitude)):
        raise ParameterError(f"amplitude must be positive, got {amplitude}")
    if not (power > 0 and math.isfinite(power)):
        raise ParameterError(f"power must be positive, got {power}")
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    d = np.arange(1, length, dtype=float)
    if mode == "approx":
        scale = math.sqrt(amplitude / 2.0) * math.pi
        if scale >= 1.0:
            raise ParameterError(
                f"approx mode needs sqrt(A/2)*pi < 1, got {scale:.6f} for A={amplitude}"
            )
        c = scale * d ** (-power / 2.0)
    else:
        target = np.minimum(amplitude * d ** (-power), EXACT_CAP)
        c = np.cos(theta_of_mi(target))
    if np.any(c >= 1.0):
        raise ParameterError("designed correlations must be below 1")
    row = np.concatenate(([1.0], c))
    return ToeplitzCovariance(length, amplitude, power, mode, row)


def _stream(seed: int, index: int) -> np.random.Generator:
    # one PCG64 stream per sequence, keyed by (seed, sequence index)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_gaussian(cov: ToeplitzCovariance, n_seqs: int, seed: int, n_jobs=None) -> np.ndarray:
    """Draw ``n_seqs`` latent Gaussian vectors, shape ``(n_seqs, length)``.

    Row ``i`` depends only on ``(seed, i)``, so the output does not depend
    on ``n_jobs``.
    """
    n_seqs = check_positive_int(n_seqs, "n_seqs")
    seed = check_random_seed(seed)
    L = cov.factor()
    N = cov.length
    out = np.empty((n_seqs, N))

    def fill(lo, hi):
        z = np.empty((hi - lo, N))
        for k, i in enumerate(range(lo, hi)):
            z[k] = _stream(seed, i).standard_normal(N)
        out[lo:hi] = z @ L.T

    chunk = 256
    bounds = [(lo, min(lo + chunk, n_seqs)) for lo in range(0, n_seqs, chunk)]
    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(lambda b: fill(*b), bounds))
    else:
        for b in bounds:
            fill(*b)
    return out


def sample_binary(cov: ToeplitzCovariance, n_seqs: int, seed: int, n_jobs=None, label="") -> Corpus:
    """Threshold latent Gaussians at zero: bit 1 where x > 0, else 0."""
    x = sample_gaussian(cov, n_seqs, seed, n_jobs)
    return Corpus.from_array((x > 0).astype(np.int64), vocab_size=2, label=label)


def make_copula_corpus(
    n_seqs=10000, length=512, amplitude=0.1, power=0.4, mode="approx", seed=0, n_jobs=None
) -> Corpus:
    """Generate a binary corpus with I(tau) ~ amplitude * tau**-power.

    Defaults reproduce the reference dataset: 10000 sequences of length 512
    with I(tau) = 0.1 tau^-0.4.
    """
    cov = build_covariance(amplitude, power, length, mode)
    return sample_binary(cov, n_seqs, seed, n_jobs)
