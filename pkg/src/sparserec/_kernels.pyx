# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend kernels.

Twin of ``sparserec._kernels_py``: same functions, same semantics, same
operation order, with the iteration loops and accumulations written as plain
ordered C loops (no reassociation), so results are bit-reproducible run to
run on one platform.
"""

from libc.math cimport INFINITY, fabs, sqrt

import numpy as np

NAME = "cython"


cdef void _mv(const double[:, ::1] A, const double[::1] x, double[::1] out) noexcept nogil:
    cdef Py_ssize_t m = A.shape[0], d = A.shape[1], i, j
    cdef double acc
    for i in range(m):
        acc = 0.0
        for j in range(d):
            acc += A[i, j] * x[j]
        out[i] = acc


cdef void _rmv(const double[:, ::1] A, const double[::1] r, double[::1] out) noexcept nogil:
    # out[j] accumulates over rows in ascending order: deterministic.
    cdef Py_ssize_t m = A.shape[0], d = A.shape[1], i, j
    for j in range(d):
        out[j] = 0.0
    for i in range(m):
        for j in range(d):
            out[j] += A[i, j] * r[i]


cdef double _nrm2(const double[::1] v) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0], i
    cdef double acc = 0.0
    for i in range(n):
        acc += v[i] * v[i]
    return sqrt(acc)


cdef void _select(const double[::1] keys, Py_ssize_t s, unsigned char[::1] used,
                  long long[::1] out) noexcept nogil:
    # s rounds of argmax with strict >, so equal keys resolve to the lowest
    # index; selected indices are then sorted ascending in place.
    cdef Py_ssize_t d = keys.shape[0], k, i, best
    cdef double bk
    cdef long long tmp
    cdef Py_ssize_t p
    for i in range(d):
        used[i] = 0
    for k in range(s):
        best = -1
        bk = -INFINITY
        for i in range(d):
            if used[i] == 0 and keys[i] > bk:
                best = i
                bk = keys[i]
        if best == -1:
            for i in range(d):
                if used[i] == 0:
                    best = i
                    break
        used[best] = 1
        out[k] = best
    for k in range(1, s):
        tmp = out[k]
        p = k
        while p > 0 and out[p - 1] > tmp:
            out[p] = out[p - 1]
            p -= 1
        out[p] = tmp


def matvec(A, x):
    cdef double[:, ::1] Av = A
    cdef double[::1] xv = x
    out = np.empty(Av.shape[0])
    cdef double[::1] ov = out
    _mv(Av, xv, ov)
    return out


def rmatvec(A, r):
    cdef double[:, ::1] Av = A
    cdef double[::1] rv = r
    out = np.empty(Av.shape[1])
    cdef double[::1] ov = out
    _rmv(Av, rv, ov)
    return out


def top_s_indices(keys, s):
    cdef double[::1] kv = keys
    cdef Py_ssize_t sv = s
    used = np.empty(kv.shape[0], dtype=np.uint8)
    out = np.empty(sv, dtype=np.int64)
    cdef unsigned char[::1] uv = used
    cdef long long[::1] ov = out
    _select(kv, sv, uv, ov)
    return out


def gram_opnorm(M, double tol, Py_ssize_t max_iters):
    """Power iteration on M^T M from the normalized all-ones vector.

    Returns (sigma, iterations, converged, last_rayleigh_quotient); see the
    pure-python twin for the stopping rule and restart behavior.
    """
    cdef double[:, ::1] Mv = M
    cdef Py_ssize_t m = Mv.shape[0], d = Mv.shape[1], i, j, k
    v_arr = np.empty(d)
    w_arr = np.empty(m)
    u_arr = np.empty(d)
    cdef double[::1] v = v_arr
    cdef double[::1] w = w_arr
    cdef double[::1] u = u_arr
    cdef double lam = 0.0, prev = 0.0, frob_sq = 0.0, un, start
    cdef bint restarted = False
    for i in range(m):
        for j in range(d):
            frob_sq += Mv[i, j] * Mv[i, j]
    start = 1.0 / sqrt(<double> d)
    for j in range(d):
        v[j] = start
    k = 0
    while k < max_iters:
        k += 1
        _mv(Mv, v, w)
        lam = 0.0
        for i in range(m):
            lam += w[i] * w[i]
        if lam == 0.0:
            if frob_sq == 0.0:
                return 0.0, k, True, 0.0
            if restarted:
                return 0.0, k, False, 0.0
            un = 0.0
            for j in range(d):
                u[j] = j + 1.0
                un += u[j] * u[j]
            un = sqrt(un)
            for j in range(d):
                v[j] = u[j] / un
            restarted = True
            continue
        if k >= 2 and fabs(lam - prev) <= tol * lam:
            return sqrt(lam), k, True, lam
        prev = lam
        _rmv(Mv, w, u)
        un = _nrm2(u)
        for j in range(d):
            v[j] = u[j] / un
    return sqrt(lam), max_iters, False, lam


def iht(A, y, Py_ssize_t s, Py_ssize_t max_iters, double stop_tol, double div_limit,
        truth, bint record_supports, bint record_iterates):
    """Hard-thresholded gradient iteration from x = 0; see the python twin."""
    cdef double[:, ::1] Av = A
    cdef double[::1] yv = y
    cdef Py_ssize_t m = Av.shape[0], d = Av.shape[1], t, i, j, iters = 0
    cdef bint has_truth = truth is not None
    cdef bint diverged = False

    x_arr = np.zeros(d)
    xn_arr = np.empty(d)
    r_arr = np.empty(m)
    a_arr = np.empty(d)
    keys_arr = np.empty(d)
    used = np.empty(d, dtype=np.uint8)
    idx_arr = np.empty(s, dtype=np.int64)
    residuals = np.empty(max_iters)
    errors = np.empty(max_iters) if has_truth else None
    supports = np.empty((max_iters, s), dtype=np.int64) if record_supports else None
    iterates = np.empty((max_iters, d)) if record_iterates else None

    cdef double[::1] x = x_arr
    cdef double[::1] xn = xn_arr
    cdef double[::1] r = r_arr
    cdef double[::1] a = a_arr
    cdef double[::1] keys = keys_arr
    cdef unsigned char[::1] uv = used
    cdef long long[::1] idx = idx_arr
    cdef double[::1] res = residuals
    cdef double[::1] err = errors if has_truth else x_arr
    cdef double[::1] tru = truth if has_truth else x_arr
    cdef long long[:, ::1] sup = supports if record_supports else idx_arr.reshape(1, -1)
    cdef double[:, ::1] ite = iterates if record_iterates else a_arr.reshape(1, -1)

    cdef double acc, dx, xnorm
    with nogil:
        for t in range(1, max_iters + 1):
            _mv(Av, x, r)
            for i in range(m):
                r[i] = yv[i] - r[i]
            if t >= 2:
                res[t - 2] = _nrm2(r)
            _rmv(Av, r, a)
            for j in range(d):
                a[j] = x[j] + a[j]
            for j in range(d):
                keys[j] = a[j] * a[j]
            _select(keys, s, uv, idx)
            for j in range(d):
                xn[j] = 0.0
            for i in range(s):
                xn[idx[i]] = a[idx[i]]
            dx = 0.0
            for j in range(d):
                acc = xn[j] - x[j]
                dx += acc * acc
            dx = sqrt(dx)
            for j in range(d):
                x[j] = xn[j]
            iters = t
            if has_truth:
                acc = 0.0
                for j in range(d):
                    acc += (x[j] - tru[j]) * (x[j] - tru[j])
                err[t - 1] = sqrt(acc)
            if record_supports:
                for i in range(s):
                    sup[t - 1, i] = idx[i]
            if record_iterates:
                for j in range(d):
                    ite[t - 1, j] = x[j]
            xnorm = _nrm2(x)
            if xnorm > div_limit:
                diverged = True
                break
            if stop_tol > 0.0 and dx <= stop_tol:
                break
        _mv(Av, x, r)
        for i in range(m):
            r[i] = yv[i] - r[i]
        res[iters - 1] = _nrm2(r)

    trim = lambda arr: None if arr is None else arr[:iters].copy()
    return (x_arr, iters, diverged, trim(residuals), trim(errors),
            trim(supports), trim(iterates))


def ilat(A, y, Py_ssize_t s, double eta, Py_ssize_t max_iters, double stop_tol,
         double div_limit, truth, bint record_supports, bint record_iterates):
    """Look-ahead-thresholded gradient iteration from x = 0; see the python twin."""
    cdef double[:, ::1] Av = A
    cdef double[::1] yv = y
    cdef Py_ssize_t m = Av.shape[0], d = Av.shape[1], t, i, j, iters = 0
    cdef bint has_truth = truth is not None
    cdef bint diverged = False
    cdef double c = 2.0 * eta

    x_arr = np.zeros(d)
    xn_arr = np.empty(d)
    r_arr = np.empty(m)
    a_arr = np.empty(d)
    g_arr = np.empty(d)
    keys_arr = np.empty(d)
    used = np.empty(d, dtype=np.uint8)
    idx_arr = np.empty(s, dtype=np.int64)
    residuals = np.empty(max_iters)
    errors = np.empty(max_iters) if has_truth else None
    supports = np.empty((max_iters, s), dtype=np.int64) if record_supports else None
    iterates = np.empty((max_iters, d)) if record_iterates else None

    cdef double[::1] x = x_arr
    cdef double[::1] xn = xn_arr
    cdef double[::1] r = r_arr
    cdef double[::1] a = a_arr
    cdef double[::1] g = g_arr
    cdef double[::1] keys = keys_arr
    cdef unsigned char[::1] uv = used
    cdef long long[::1] idx = idx_arr
    cdef double[::1] res = residuals
    cdef double[::1] err = errors if has_truth else x_arr
    cdef double[::1] tru = truth if has_truth else x_arr
    cdef long long[:, ::1] sup = supports if record_supports else idx_arr.reshape(1, -1)
    cdef double[:, ::1] ite = iterates if record_iterates else a_arr.reshape(1, -1)

    cdef double acc, dx, xnorm
    with nogil:
        for t in range(1, max_iters + 1):
            _mv(Av, x, r)
            for i in range(m):
                r[i] = yv[i] - r[i]
            if t >= 2:
                res[t - 2] = _nrm2(r)
            _rmv(Av, r, a)
            for j in range(d):
                a[j] = x[j] + a[j]
            _mv(Av, a, r)
            for i in range(m):
                r[i] = yv[i] - r[i]
            _rmv(Av, r, g)
            for j in range(d):
                g[j] = -2.0 * g[j]
            for j in range(d):
                keys[j] = a[j] * a[j] - (c * a[j]) * g[j]
            _select(keys, s, uv, idx)
            for j in range(d):
                xn[j] = 0.0
            for i in range(s):
                xn[idx[i]] = a[idx[i]]
            dx = 0.0
            for j in range(d):
                acc = xn[j] - x[j]
                dx += acc * acc
            dx = sqrt(dx)
            for j in range(d):
                x[j] = xn[j]
            iters = t
            if has_truth:
                acc = 0.0
                for j in range(d):
                    acc += (x[j] - tru[j]) * (x[j] - tru[j])
                err[t - 1] = sqrt(acc)
            if record_supports:
                for i in range(s):
                    sup[t - 1, i] = idx[i]
            if record_iterates:
                for j in range(d):
                    ite[t - 1, j] = x[j]
            xnorm = _nrm2(x)
            if xnorm > div_limit:
                diverged = True
                break
            if stop_tol > 0.0 and dx <= stop_tol:
                break
        _mv(Av, x, r)
        for i in range(m):
            r[i] = yv[i] - r[i]
        res[iters - 1] = _nrm2(r)

    trim = lambda arr: None if arr is None else arr[:iters].copy()
    return (x_arr, iters, diverged, trim(residuals), trim(errors),
            trim(supports), trim(iterates))
