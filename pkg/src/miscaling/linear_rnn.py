"""Exact second-moment analysis of a linear Elman RNN with Gaussian output.

Model (output convention o_t = U_o U_h h_{t-1}):

    h_t = U_h h_{t-1} + W_h x_{t-1} (+ b_h)
    x_t ~ N(U_o U_h h_{t-1} (+ b_o), sigma2 I_d)

Stacking s_t = (h_t, x_t) gives s_t = T s_{t-1} + eta_t with
T = [[U_h, W_h], [U_o U_h, 0]] and Cov(eta_t) = diag(0, sigma2 I_d), so the
joint covariance of (s_t, x_0) propagates exactly. The generating function
of the cross-covariance Sigma_{x_t x_0} is rational, and its smallest-modulus
pole fixes the exponential decay rate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from ._validation import check_positive_int, check_random_seed
from .estimation import MICurve
from .exceptions import DomainError, ParameterError

__all__ = [
    "LinearRnnParams",
    "CovarianceState",
    "PoleReport",
    "propagate",
    "propagate_mean",
    "sigma_recurrence_oracle",
    "mi_gaussian",
    "mi_curve_linear_rnn",
    "pole_polynomial",
    "poles",
    "classify_stability",
    "sample_linear_rnn",
]

PSD_TOL = 1e-10
POLE_FLOOR = 1e-9
UNIT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LinearRnnParams:
    """Weights, output noise and the joint law of (h_0, x_0).

    ``Sigma0`` is the (m+d)x(m+d) covariance of (h_0, x_0); ``mean0`` and the
    biases only shift means and never enter the MI.
    """

    U_h: np.ndarray
    W_h: np.ndarray
    U_o: np.ndarray
    sigma2: float
    Sigma0: np.ndarray
    mean0: np.ndarray = None
    bias_h: np.ndarray = None
    bias_o: np.ndarray = None

    def __post_init__(self):
        U_h = np.atleast_2d(np.asarray(self.U_h, dtype=float))
        m = U_h.shape[0]
        if U_h.shape != (m, m):
            raise ParameterError(f"U_h must be square, got shape {U_h.shape}")
        W_h = np.asarray(self.W_h, dtype=float).reshape(m, -1) if np.size(self.W_h) else None
        if W_h is None or W_h.shape[0] != m:
            raise ParameterError(f"W_h must have {m} rows")
        d = W_h.shape[1]
        U_o = np.asarray(self.U_o, dtype=float)
        if U_o.size != d * m:
            raise ParameterError(f"U_o must be {d}x{m}, got {U_o.size} entries")
        U_o = U_o.reshape(d, m)
        Sigma0 = np.asarray(self.Sigma0, dtype=float)
        if Sigma0.size != (m + d) ** 2:
            raise ParameterError(f"Sigma0 must be {m + d}x{m + d}, got {Sigma0.size} entries")
        Sigma0 = Sigma0.reshape(m + d, m + d)
        scale = max(1.0, float(np.abs(Sigma0).max()))
        if not np.allclose(Sigma0, Sigma0.T, atol=PSD_TOL * scale, rtol=0):
            raise ParameterError("Sigma0 must be symmetric")
        Sigma0 = 0.5 * (Sigma0 + Sigma0.T)
        if np.linalg.eigvalsh(Sigma0)[0] < -PSD_TOL * scale:
            raise ParameterError("Sigma0 must be positive semi-definite")
        sigma2 = float(self.sigma2)
        if not (sigma2 > 0 and math.isfinite(sigma2)):
            raise ParameterError(f"sigma2 must be positive, got {self.sigma2}")

        def vec(value, n, name):
            if value is None:
                return np.zeros(n)
            v = np.asarray(value, dtype=float).ravel()
            if v.size != n:
                raise ParameterError(f"{name} must have {n} entries, got {v.size}")
            return v

        values = {
            "U_h": U_h,
            "W_h": W_h,
            "U_o": U_o,
            "sigma2": sigma2,
            "Sigma0": Sigma0,
            "mean0": vec(self.mean0, m + d, "mean0"),
            "bias_h": vec(self.bias_h, m, "bias_h"),
            "bias_o": vec(self.bias_o, d, "bias_o"),
        }
        for key, value in values.items():
            if isinstance(value, np.ndarray):
                value = value.view()
                value.setflags(write=False)
            object.__setattr__(self, key, value)

    @property
    def m(self) -> int:
        return self.U_h.shape[0]

    @property
    def d(self) -> int:
        return self.W_h.shape[1]

    def transition(self) -> np.ndarray:
        m, d = self.m, self.d
        T = np.zeros((m + d, m + d))
        T[:m, :m] = self.U_h
        T[:m, m:] = self.W_h
        T[m:, :m] = self.U_o @ self.U_h
        return T

    def noise_cov(self) -> np.ndarray:
        Q = np.zeros((self.m + self.d,) * 2)
        Q[self.m :, self.m :] = self.sigma2 * np.eye(self.d)
        return Q


@dataclass(frozen=True, eq=False)
class CovarianceState:
    t: int
    Sigma_ss: np.ndarray  # Cov(s_t, s_t)
    Sigma_sx0: np.ndarray  # Cov(s_t, x_0)
    m: int

    @property
    def Sigma_xx(self) -> np.ndarray:
        return self.Sigma_ss[self.m :, self.m :]

    @property
    def Sigma_xx0(self) -> np.ndarray:
        """Sigma_{x_t x_0}."""
        return self.Sigma_sx0[self.m :]


def propagate(params: LinearRnnParams, T_max: int) -> list:
    """Covariance states for t = 0..T_max by exact linear-Gaussian updates."""
    T_max = check_positive_int(T_max, "T_max", minimum=0)
    m = params.m
    T = params.transition()
    Q = params.noise_cov()
    S = params.Sigma0.copy()
    C = params.Sigma0[:, m:].copy()
    states = [CovarianceState(0, S, C, m)]
    for t in range(1, T_max + 1):
        S = T @ S @ T.T + Q
        S = 0.5 * (S + S.T)
        C = T @ C
        states.append(CovarianceState(t, S, C, m))
    return states


def propagate_mean(params: LinearRnnParams, T_max: int) -> np.ndarray:
    """E[x_t] for t = 0..T_max, shape (T_max+1, d)."""
    m = params.m
    T = params.transition()
    drift = np.concatenate([params.bias_h, params.bias_o])
    mu = params.mean0.copy()
    out = [mu[m:].copy()]
    for _ in range(T_max):
        mu = T @ mu + drift
        out.append(mu[m:].copy())
    return np.array(out)


def sigma_recurrence_oracle(params: LinearRnnParams, T_max: int) -> list:
    """Sigma_{x_t x_0} for t = 0..T_max from the direct O(T^2) recurrence

        Sigma_{x_t x_0} = U_o U_h^t Sigma_{h_0 x_0}
                          + sum_{i=0}^{t-2} U_o U_h^{t-1-i} W_h Sigma_{x_i x_0}.
    """
    m = params.m
    S_hx = params.Sigma0[:m, m:]
    S_xx = params.Sigma0[m:, m:]
    # U_o U_h^k for k = 0..T_max
    powers = [params.U_o]
    for _ in range(T_max):
        powers.append(powers[-1] @ params.U_h)
    out = [S_xx.copy()]
    for t in range(1, T_max + 1):
        acc = powers[t] @ S_hx
        for i in range(t - 1):
            acc = acc + powers[t - 1 - i] @ params.W_h @ out[i]
        out.append(acc)
    return out


def mi_gaussian(Sigma_xx, Sigma_yy, Sigma_xy) -> float:
    """Exact MI (nats) of jointly Gaussian X, Y:
    -1/2 ln det(I - Sxx^-1 Sxy Syy^-1 Sxy^T).

    The determinant is taken through the canonical correlations rho_i
    (singular values of Lx^-1 Sxy Ly^-T) as -1/2 sum ln(1 - rho_i^2), which
    keeps full relative precision when the MI is tiny. Returns ``inf`` for
    perfectly correlated pairs.
    """
    Sxx = np.atleast_2d(np.asarray(Sigma_xx, dtype=float))
    Syy = np.atleast_2d(np.asarray(Sigma_yy, dtype=float))
    Sxy = np.atleast_2d(np.asarray(Sigma_xy, dtype=float))
    if Sxy.shape != (Sxx.shape[0], Syy.shape[0]):
        raise DomainError("cross-covariance shape does not match the marginals")
    try:
        Lx = np.linalg.cholesky(Sxx)
        Ly = np.linalg.cholesky(Syy)
    except np.linalg.LinAlgError:
        raise DomainError("marginal covariances must be positive definite") from None
    G = solve_triangular(Lx, Sxy, lower=True)
    G = solve_triangular(Ly, G.T, lower=True).T
    rho2 = np.linalg.svd(G, compute_uv=False) ** 2
    if np.any(rho2 >= 1.0):
        return math.inf
    return float(-0.5 * np.sum(np.log1p(-rho2)))


def mi_curve_linear_rnn(params: LinearRnnParams, T_max: int) -> MICurve:
    """Analytic I(x_0; x_t) for t = 1..T_max.

    Memorizing instances are computed anyway; the returned curve carries a
    warning and a :class:`RuntimeWarning` is emitted.
    """
    states = propagate(params, T_max)
    S00 = states[0].Sigma_xx
    mi = [mi_gaussian(S00, st.Sigma_xx, st.Sigma_xx0.T) for st in states[1:]]
    tau = np.arange(1, T_max + 1)
    note = None
    kind = classify_stability(params)
    if kind != "decaying":
        note = f"{kind} instance: cross-covariance does not decay"
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return MICurve(tau, np.array(mi), np.zeros(T_max, dtype=np.int64), "analytic", warning=note)


@dataclass(frozen=True, eq=False)
class PoleReport:
    """Poles of the cross-covariance generating function.

    ``predicted_rate`` is ln|z_min|: the covariance decays as
    |z_min|^-t, so the MI decays at twice this rate.
    """

    poles: np.ndarray
    multiplicity: np.ndarray
    z_min: complex | None
    predicted_rate: float
    feedback: bool
    coefficients: np.ndarray = field(repr=False)

    @property
    def stability(self) -> str:
        if self.z_min is None:
            return "decaying"
        r = abs(self.z_min)
        if r > 1.0 + UNIT_TOL:
            return "decaying"
        if r < 1.0 - UNIT_TOL:
            return "memorizing"
        return "marginal"


def _pole_poly_value(params: LinearRnnParams, z: complex) -> complex:
    m, d = params.m, params.d
    block = np.zeros((m + d, m + d), dtype=complex)
    block[:m, :m] = np.eye(m) - params.U_h * z
    block[:m, m:] = params.U_h @ params.W_h * z * z
    block[m:, :m] = params.U_o
    block[m:, m:] = np.eye(d)
    return np.linalg.det(block)


def pole_polynomial(params: LinearRnnParams) -> np.ndarray:
    """Ascending real coefficients of det(I - U_h z) det(I - A(z)), where
    A(z) = U_o (I - U_h z)^-1 U_h W_h z^2.

    The polynomial has degree <= m + d and is recovered exactly from its
    values at m + d + 1 roots of unity.
    """
    n = params.m + params.d + 1
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    values = np.array([_pole_poly_value(params, z) for z in nodes])
    coef = (np.fft.fft(values) / n).real
    big = np.abs(coef).max()
    coef[np.abs(coef) < 1e-12 * big] = 0.0
    nz = np.nonzero(coef)[0]
    return coef[: nz[-1] + 1]


def _companion_roots(coef: np.ndarray) -> np.ndarray:
    """Roots of sum_k coef[k] z^k via eigenvalues of the companion matrix."""
    deg = coef.size - 1
    if deg < 1:
        return np.array([], dtype=complex)
    monic = coef[:-1] / coef[-1]
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic
    return np.linalg.eigvals(comp).astype(complex)


def _cluster(roots: np.ndarray, tol: float = 1e-6):
    remaining = list(roots)
    reps, mult = [], []
    while remaining:
        z = remaining.pop(0)
        group = [z]
        rest = []
        for w in remaining:
            if abs(w - z) <= tol * (1.0 + abs(z)):
                group.append(w)
            else:
                rest.append(w)
        remaining = rest
        reps.append(np.mean(group))
        mult.append(len(group))
    return np.array(reps, dtype=complex), np.array(mult, dtype=np.int64)


def poles(params: LinearRnnParams) -> PoleReport:
    """Pole report of the generating function of Sigma_{x_t x_0}."""
    coef = pole_polynomial(params)
    roots = _companion_roots(coef)
    roots = roots[np.abs(roots) > POLE_FLOOR]
    reps, mult = _cluster(roots)
    order = np.lexsort((np.angle(reps), np.abs(reps)))
    reps, mult = reps[order], mult[order]
    # A(z) vanishes identically iff U_o U_h^k W_h = 0 for k = 1..m
    P = params.U_o @ params.U_h
    feedback = False
    for _ in range(params.m):
        if np.any(np.abs(P @ params.W_h) > 0):
            feedback = True
            break
        P = P @ params.U_h
    if reps.size:
        z_min = complex(reps[0])
        rate = math.log(abs(z_min))
    else:
        z_min, rate = None, math.inf
    return PoleReport(reps, mult, z_min, rate, feedback, coef)


def classify_stability(params: LinearRnnParams) -> str:
    """``"decaying"``, ``"memorizing"`` or ``"marginal"`` from |z_min|."""
    return poles(params).stability


def _psd_sqrt(S: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(S)
    return Q * np.sqrt(np.clip(w, 0.0, None))


def sample_linear_rnn(params: LinearRnnParams, n_seqs: int, T: int, seed, chunk: int = 4096) -> np.ndarray:
    """Monte Carlo sequences x_0..x_T, shape ``(n_seqs, T+1, d)``.

    Runs are drawn in fixed chunks of ``chunk`` sequences, each from its own
    stream keyed by (seed, chunk index).
    """
    n_seqs = check_positive_int(n_seqs, "n_seqs")
    T = check_positive_int(T, "T", minimum=0)
    seed = check_random_seed(seed)
    m, d = params.m, params.d
    root = _psd_sqrt(params.Sigma0)
    UoUh = params.U_o @ params.U_h
    sigma = math.sqrt(params.sigma2)
    out = np.empty((n_seqs, T + 1, d))
    for c, lo in enumerate(range(0, n_seqs, chunk)):
        hi = min(lo + chunk, n_seqs)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(c,))))
        k = hi - lo
        s0 = params.mean0 + rng.standard_normal((k, m + d)) @ root.T
        h, x = s0[:, :m], s0[:, m:]
        out[lo:hi, 0] = x
        for t in range(1, T + 1):
            x_new = h @ UoUh.T + params.bias_o + sigma * rng.standard_normal((k, d))
            h = h @ params.U_h.T + x @ params.W_h.T + params.bias_h
            x = x_new
            out[lo:hi, t] = x
    return out
