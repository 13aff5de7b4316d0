"""Independent reference implementations used to derive expected values.

Everything here is written directly from the mathematical definitions with
plain scalar loops and shares no code with the package, so tests can check
the production implementations against a second, independent source.
"""

import math

import numpy as np


def ma_value(b, a, x):
    """max_k (b_k + a_k . x), plain loops."""
    best = -math.inf
    for k in range(len(b)):
        v = b[k]
        for i in range(len(x)):
            v += a[k][i] * x[i]
        best = max(best, v)
    return best


def sma_value(b, a, alpha, x):
    """(1/alpha) log sum_k exp(alpha (b_k + a_k . x)), shifted by the max."""
    acts = []
    for k in range(len(b)):
        v = b[k]
        for i in range(len(x)):
            v += a[k][i] * x[i]
        acts.append(v)
    zmax = max(alpha * t for t in acts)
    s = sum(math.exp(alpha * t - zmax) for t in acts)
    return (zmax + math.log(s)) / alpha


def dma_value(b, a, h, g, x):
    return ma_value(b, a, x) - ma_value(h, g, x)


def sdma_value(b, a, alpha, h, g, beta, x):
    return sma_value(b, a, alpha, x) - sma_value(h, g, beta, x)


def fd_gradient(f, gamma, step=1e-6):
    """Central finite differences of a scalar function of a vector."""
    gamma = np.asarray(gamma, dtype=float)
    grad = np.zeros(gamma.size)
    for i in range(gamma.size):
        up = gamma.copy()
        dn = gamma.copy()
        up[i] += step
        dn[i] -= step
        grad[i] = (f(up) - f(dn)) / (2.0 * step)
    return grad


def lstsq_gamma(A, y):
    """Closed-form least-squares solution via the normal equations."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.linalg.solve(A.T @ A, A.T @ y)


def min_norm_plane(x, y):
    """Minimum-norm (b, a) with b + a . x = y for a single point x."""
    x = np.asarray(x, dtype=float)
    scale = y / (1.0 + float(x @ x))
    return scale, scale * x


def chord_ma_rms(f, lo, hi, pieces, xs):
    """RMS of the equal-width chord interpolant of a convex f on grid xs.

    For convex f the interpolant equals the max of its chords, so this is
    an achievable max-affine error and an upper bound for the best fit.
    """
    knots = np.linspace(lo, hi, pieces + 1)
    b = []
    a = []
    for j in range(pieces):
        x0, x1 = knots[j], knots[j + 1]
        slope = (f(x1) - f(x0)) / (x1 - x0)
        a.append([slope])
        b.append(f(x0) - slope * x0)
    vals = np.array([ma_value(b, a, [x]) for x in xs])
    target = np.array([f(x) for x in xs])
    return float(np.sqrt(np.mean((vals - target) ** 2)))


def centered_chord_ma_rms(f, lo, hi, pieces, xs):
    """Chord interpolant RMS after the optimal constant downward shift.

    Subtracting a constant from every chord offset is still a max-affine
    function; the mean-gap shift centers the one-sided chord error and
    gives a strictly better achievable RMS than the raw interpolant.
    """
    knots = np.linspace(lo, hi, pieces + 1)
    b = []
    a = []
    for j in range(pieces):
        x0, x1 = knots[j], knots[j + 1]
        slope = (f(x1) - f(x0)) / (x1 - x0)
        a.append([slope])
        b.append(f(x0) - slope * x0)
    gap = np.array([ma_value(b, a, [x]) - f(x) for x in xs])
    return float(np.sqrt(np.mean((gap - np.mean(gap)) ** 2)))


def posynomial_value(coefficients, exponents, u):
    """sum_k c_k prod_i u_i^{e_ki}, plain loops in original variables."""
    total = 0.0
    for c, row in zip(coefficients, exponents):
        term = c
        for ui, e in zip(u, row):
            term *= ui ** e
        total += term
    return total
