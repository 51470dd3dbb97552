"""Shared oracles and statistics for the test suite."""

import math

import numpy as np


def batch_se(estimates):
    """Standard error of a full-sample estimate from B batch estimates."""
    estimates = np.asarray(estimates, dtype=float)
    return estimates.std(axis=0, ddof=1) / math.sqrt(estimates.shape[0])


def brute_mi(joint):
    """Mutual information of a joint probability table, summed cell by cell."""
    joint = np.asarray(joint, dtype=float)
    joint = joint / joint.sum()
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    total = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            if joint[i, j] > 0:
                total += joint[i, j] * math.log(joint[i, j] / (px[i] * py[j]))
    return total


def random_decaying_rnn(rng, m=None, d=None, radius=0.9, contractive_uh=False):
    """Random linear RNN with spectral radius of T below ``radius``.

    ``contractive_uh`` additionally requires the spectral radius of U_h to
    be below ``radius`` (no instance held stable only by output feedback).
    """
    from miscaling import LinearRnnParams

    m = m or int(rng.integers(1, 4))
    d = d or int(rng.integers(1, 3))
    while True:
        U_h = rng.normal(size=(m, m)) / math.sqrt(m)
        W_h = rng.normal(size=(m, d))
        U_o = rng.normal(size=(d, m)) * 0.5
        n = m + d
        B = rng.normal(size=(n, n))
        Sigma0 = B @ B.T / n
        p = LinearRnnParams(U_h, W_h, U_o, float(rng.uniform(0.2, 2.0)), Sigma0)
        rho = np.abs(np.linalg.eigvals(p.transition())).max()
        rho_h = np.abs(np.linalg.eigvals(U_h)).max()
        if 0.05 < rho < radius and (rho_h < radius or not contractive_uh):
            return p


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.abs(b).max(), 1e-300)
    return float(np.abs(a - b).max() / scale)
