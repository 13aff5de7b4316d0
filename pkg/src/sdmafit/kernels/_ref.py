"""Pure-numpy kernel backend.

Vectorized implementations of the batched evaluation and Jacobian routines.
Shapes: ``X`` is (m, n), plane offsets are (k,), plane slopes (k, n). The
Jacobian column layout per block is [offsets, slopes row-major, log-softness]
and matches the stacked parameter vector used by the fitter.
"""

from __future__ import annotations

import numpy as np


def ma_values(b, a, X):
    T = X @ a.T + b
    return T.max(axis=1)


def ma_values_argmax(b, a, X):
    T = X @ a.T + b
    idx = T.argmax(axis=1)  # first max wins: lowest-index tie break
    vals = T[np.arange(T.shape[0]), idx]
    return vals, idx.astype(np.int64)


def sma_values(b, a, log_alpha, X):
    # overflowing softness yields non-finite values that the solver
    # rejects as a failed trial step, so the warnings are suppressed
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        alpha = np.exp(log_alpha)
        Z = alpha * (X @ a.T + b)
        zmax = Z.max(axis=1)
        lse = zmax + np.log(np.exp(Z - zmax[:, None]).sum(axis=1))
        return lse / alpha


def _softmax_parts(b, a, log_alpha, X):
    """Plane activations T, softmax weights S, and soft values for one block."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        alpha = np.exp(log_alpha)
        T = X @ a.T + b
        Z = alpha * T
        zmax = Z.max(axis=1)
        E = np.exp(Z - zmax[:, None])
        denom = E.sum(axis=1)
        S = E / denom[:, None]
        vals = (zmax + np.log(denom)) / alpha
    return T, S, vals


def ma_value_jacobian(b, a, X):
    m, n = X.shape
    k = b.shape[0]
    vals, idx = ma_values_argmax(b, a, X)
    J = np.zeros((m, k * (1 + n)))
    rows = np.arange(m)
    J[rows, idx] = 1.0
    cols = k + idx[:, None] * n + np.arange(n)
    J[rows[:, None], cols] = X
    return vals, J


def sma_value_jacobian(b, a, log_alpha, X):
    m, n = X.shape
    k = b.shape[0]
    T, S, vals = _softmax_parts(b, a, log_alpha, X)
    J = np.empty((m, k * (1 + n) + 1))
    J[:, :k] = S
    J[:, k:k + k * n] = (S[:, :, None] * X[:, None, :]).reshape(m, k * n)
    J[:, k + k * n] = (S * T).sum(axis=1) - vals
    return vals, J


def dma_value_jacobian(bc, ac, hc, gc, X):
    m, n = X.shape
    k = bc.shape[0]
    mm = hc.shape[0]
    vc, ic = ma_values_argmax(bc, ac, X)
    vh, ih = ma_values_argmax(hc, gc, X)
    J = np.zeros((m, (k + mm) * (1 + n)))
    rows = np.arange(m)
    J[rows, ic] = 1.0
    J[rows[:, None], k + ic[:, None] * n + np.arange(n)] = X
    off = k * (1 + n)
    J[rows, off + ih] = -1.0
    J[rows[:, None], off + mm + ih[:, None] * n + np.arange(n)] = -X
    return vc - vh, J


def sdma_value_jacobian(bc, ac, log_alpha, hc, gc, log_beta, X):
    m, n = X.shape
    k = bc.shape[0]
    mm = hc.shape[0]
    Tc, Sc, vc = _softmax_parts(bc, ac, log_alpha, X)
    Th, Sh, vh = _softmax_parts(hc, gc, log_beta, X)
    J = np.empty((m, (k + mm) * (1 + n) + 2))
    J[:, :k] = Sc
    J[:, k:k + k * n] = (Sc[:, :, None] * X[:, None, :]).reshape(m, k * n)
    J[:, k + k * n] = (Sc * Tc).sum(axis=1) - vc
    off = k * (1 + n) + 1
    J[:, off:off + mm] = -Sh
    J[:, off + mm:off + mm + mm * n] = \
        (-Sh[:, :, None] * X[:, None, :]).reshape(m, mm * n)
    J[:, off + mm + mm * n] = vh - (Sh * Th).sum(axis=1)
    return vc - vh, J
