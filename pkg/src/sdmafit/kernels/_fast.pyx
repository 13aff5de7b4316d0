# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors the pure-numpy reference implementation function for function;
see _ref.py for the shape conventions and Jacobian column layout. Loops
are typed and bounds-check-free, which is what makes the fitter's inner
iterations cheap on small and medium batches.
"""

import numpy as np

from libc.math cimport exp, log, INFINITY


def ma_values(b, a, X):
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).reshape(bv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], n = Xv.shape[1], k = bv.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, t
    cdef double best, v
    for i in range(m):
        best = -INFINITY
        for j in range(k):
            v = bv[j]
            for t in range(n):
                v += av[j, t] * Xv[i, t]
            if v > best:
                best = v
        ov[i] = best
    return out


def ma_values_argmax(b, a, X):
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).reshape(bv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], n = Xv.shape[1], k = bv.shape[0]
    vals = np.empty(m)
    idx = np.empty(m, dtype=np.int64)
    cdef double[::1] ov = vals
    cdef long long[::1] iv = idx
    cdef Py_ssize_t i, j, t, bj
    cdef double best, v
    for i in range(m):
        best = -INFINITY
        bj = 0
        for j in range(k):
            v = bv[j]
            for t in range(n):
                v += av[j, t] * Xv[i, t]
            if v > best:  # strict: ties keep the lowest index
                best = v
                bj = j
        ov[i] = best
        iv[i] = bj
    return vals, idx


cdef inline double _row_lse(const double[::1] bv,
                            const double[:, ::1] av, double alpha,
                            const double[:, ::1] Xv, Py_ssize_t i,
                            double[::1] T, double[::1] S) nogil:
    """Soft value of one block at row i; fills activations T and weights S."""
    cdef Py_ssize_t k = bv.shape[0], n = Xv.shape[1]
    cdef Py_ssize_t j, t
    cdef double v, zmax, denom, z
    zmax = -INFINITY
    for j in range(k):
        v = bv[j]
        for t in range(n):
            v += av[j, t] * Xv[i, t]
        T[j] = v
        z = alpha * v
        if z > zmax:
            zmax = z
    denom = 0.0
    for j in range(k):
        S[j] = exp(alpha * T[j] - zmax)
        denom += S[j]
    for j in range(k):
        S[j] /= denom
    return (zmax + log(denom)) / alpha


def sma_values(b, a, log_alpha, X):
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).reshape(bv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], k = bv.shape[0]
    cdef double alpha = exp(<double> log_alpha)
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef double[::1] T = np.empty(k)
    cdef double[::1] S = np.empty(k)
    cdef Py_ssize_t i
    for i in range(m):
        ov[i] = _row_lse(bv, av, alpha, Xv, i, T, S)
    return out


def ma_value_jacobian(b, a, X):
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).reshape(bv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], n = Xv.shape[1], k = bv.shape[0]
    vals = np.empty(m)
    J = np.zeros((m, k * (1 + n)))
    cdef double[::1] ov = vals
    cdef double[:, ::1] Jv = J
    cdef Py_ssize_t i, j, t, bj
    cdef double best, v
    for i in range(m):
        best = -INFINITY
        bj = 0
        for j in range(k):
            v = bv[j]
            for t in range(n):
                v += av[j, t] * Xv[i, t]
            if v > best:
                best = v
                bj = j
        ov[i] = best
        Jv[i, bj] = 1.0
        for t in range(n):
            Jv[i, k + bj * n + t] = Xv[i, t]
    return vals, J


def sma_value_jacobian(b, a, log_alpha, X):
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).reshape(bv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], n = Xv.shape[1], k = bv.shape[0]
    cdef double alpha = exp(<double> log_alpha)
    vals = np.empty(m)
    J = np.empty((m, k * (1 + n) + 1))
    cdef double[::1] ov = vals
    cdef double[:, ::1] Jv = J
    cdef double[::1] T = np.empty(k)
    cdef double[::1] S = np.empty(k)
    cdef Py_ssize_t i, j, t
    cdef double val, st
    for i in range(m):
        val = _row_lse(bv, av, alpha, Xv, i, T, S)
        ov[i] = val
        st = 0.0
        for j in range(k):
            Jv[i, j] = S[j]
            for t in range(n):
                Jv[i, k + j * n + t] = S[j] * Xv[i, t]
            st += S[j] * T[j]
        Jv[i, k + k * n] = st - val
    return vals, J


def dma_value_jacobian(bc, ac, hc, gc, X):
    cdef const double[::1] bcv = np.ascontiguousarray(bc, dtype=np.float64)
    cdef const double[:, ::1] acv = np.ascontiguousarray(
        np.asarray(ac, dtype=np.float64).reshape(bcv.shape[0], -1))
    cdef const double[::1] hcv = np.ascontiguousarray(hc, dtype=np.float64)
    cdef const double[:, ::1] gcv = np.ascontiguousarray(
        np.asarray(gc, dtype=np.float64).reshape(hcv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], n = Xv.shape[1]
    cdef Py_ssize_t k = bcv.shape[0], mm = hcv.shape[0]
    cdef Py_ssize_t off = k * (1 + n)
    vals = np.empty(m)
    J = np.zeros((m, (k + mm) * (1 + n)))
    cdef double[::1] ov = vals
    cdef double[:, ::1] Jv = J
    cdef Py_ssize_t i, j, t, jc, jh
    cdef double best, v
    for i in range(m):
        best = -INFINITY
        jc = 0
        for j in range(k):
            v = bcv[j]
            for t in range(n):
                v += acv[j, t] * Xv[i, t]
            if v > best:
                best = v
                jc = j
        ov[i] = best
        best = -INFINITY
        jh = 0
        for j in range(mm):
            v = hcv[j]
            for t in range(n):
                v += gcv[j, t] * Xv[i, t]
            if v > best:
                best = v
                jh = j
        ov[i] -= best
        Jv[i, jc] = 1.0
        Jv[i, off + jh] = -1.0
        for t in range(n):
            Jv[i, k + jc * n + t] = Xv[i, t]
            Jv[i, off + mm + jh * n + t] = -Xv[i, t]
    return vals, J


def sdma_value_jacobian(bc, ac, log_alpha, hc, gc, log_beta, X):
    cdef const double[::1] bcv = np.ascontiguousarray(bc, dtype=np.float64)
    cdef const double[:, ::1] acv = np.ascontiguousarray(
        np.asarray(ac, dtype=np.float64).reshape(bcv.shape[0], -1))
    cdef const double[::1] hcv = np.ascontiguousarray(hc, dtype=np.float64)
    cdef const double[:, ::1] gcv = np.ascontiguousarray(
        np.asarray(gc, dtype=np.float64).reshape(hcv.shape[0], -1))
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], n = Xv.shape[1]
    cdef Py_ssize_t k = bcv.shape[0], mm = hcv.shape[0]
    cdef Py_ssize_t off = k * (1 + n) + 1
    cdef double alpha = exp(<double> log_alpha)
    cdef double beta = exp(<double> log_beta)
    vals = np.empty(m)
    J = np.empty((m, (k + mm) * (1 + n) + 2))
    cdef double[::1] ov = vals
    cdef double[:, ::1] Jv = J
    cdef double[::1] Tc = np.empty(k)
    cdef double[::1] Sc = np.empty(k)
    cdef double[::1] Th = np.empty(mm)
    cdef double[::1] Sh = np.empty(mm)
    cdef Py_ssize_t i, j, t
    cdef double vc, vh, st
    for i in range(m):
        vc = _row_lse(bcv, acv, alpha, Xv, i, Tc, Sc)
        vh = _row_lse(hcv, gcv, beta, Xv, i, Th, Sh)
        ov[i] = vc - vh
        st = 0.0
        for j in range(k):
            Jv[i, j] = Sc[j]
            for t in range(n):
                Jv[i, k + j * n + t] = Sc[j] * Xv[i, t]
            st += Sc[j] * Tc[j]
        Jv[i, k + k * n] = st - vc
        st = 0.0
        for j in range(mm):
            Jv[i, off + j] = -Sh[j]
            for t in range(n):
                Jv[i, off + mm + j * n + t] = -Sh[j] * Xv[i, t]
            st += Sh[j] * Th[j]
        Jv[i, off + mm + mm * n] = vh - st
    return vals, J
