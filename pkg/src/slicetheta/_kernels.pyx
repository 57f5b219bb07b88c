# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice kernels.

Same contract as ``_kernels_py``; see that module for the reference
implementation.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, floor, sqrt, exp, cos, sin

cnp.import_array()


def ball_coefficients(const double[:, ::1] R, double radius_sq, double slack):
    """Integer vectors m with ||R m||^2 <= radius_sq (plus slack).

    ``R`` is the upper Cholesky factor of the Gram matrix.  The result is a
    superset of the exact ball; callers filter on the exact norm.
    """
    cdef Py_ssize_t d = R.shape[0]
    cdef Py_ssize_t cap = 1024, count = 0, level, j
    cdef cnp.int64_t[:, ::1] out = np.empty((cap, d), dtype=np.int64)
    cdef cnp.int64_t[::1] m = np.zeros(d, dtype=np.int64)
    cdef cnp.int64_t[::1] upper = np.zeros(d, dtype=np.int64)
    cdef double[::1] center = np.zeros(d)
    cdef double[::1] budget = np.zeros(d)
    cdef double t, rem, half, s

    if radius_sq < 0:
        return np.empty((0, d), dtype=np.int64)

    level = d - 1
    budget[level] = radius_sq + slack
    center[level] = 0.0
    half = sqrt(budget[level]) / R[level, level]
    m[level] = <cnp.int64_t>ceil(center[level] - half - 1e-9)
    upper[level] = <cnp.int64_t>floor(center[level] + half + 1e-9)

    while True:
        if m[level] > upper[level]:
            level += 1
            if level == d:
                break
            m[level] += 1
            continue
        t = R[level, level] * (m[level] - center[level])
        rem = budget[level] - t * t
        if rem < -slack:
            m[level] += 1
            continue
        if level == 0:
            if count == cap:
                cap *= 2
                grown = np.empty((cap, d), dtype=np.int64)
                grown[:count] = np.asarray(out)[:count]
                out = grown
            for j in range(d):
                out[count, j] = m[j]
            count += 1
            m[0] += 1
            continue
        level -= 1
        s = 0.0
        for j in range(level + 1, d):
            s += R[level, j] * m[j]
        center[level] = -s / R[level, level]
        budget[level] = rem if rem > 0.0 else 0.0
        half = sqrt(budget[level]) / R[level, level]
        m[level] = <cnp.int64_t>ceil(center[level] - half - 1e-9)
        upper[level] = <cnp.int64_t>floor(center[level] + half + 1e-9)

    return np.asarray(out)[:count].copy()


def exp_sum(const double[:, ::1] coords, double complex a,
            const double complex[::1] shift, const double complex[::1] lin, weights=None):
    """sum_q w_q exp(a * sum_i (q_i + shift_i)^2 + sum_i lin_i q_i).

    Real and imaginary parts are accumulated with Neumaier compensation.
    """
    cdef Py_ssize_t n = coords.shape[0], d = coords.shape[1], k, i
    cdef const double[::1] w
    cdef bint weighted = weights is not None
    cdef double complex quad, lt, e, t
    cdef double mag, vr, vi, sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0, tmp
    if weighted:
        w = np.ascontiguousarray(weights, dtype=np.float64)
    for k in range(n):
        quad = 0.0
        lt = 0.0
        for i in range(d):
            t = coords[k, i] + shift[i]
            quad = quad + t * t
            lt = lt + lin[i] * coords[k, i]
        e = a * quad + lt
        mag = exp(e.real)
        if weighted:
            mag = mag * w[k]
        vr = mag * cos(e.imag)
        vi = mag * sin(e.imag)
        tmp = sr + vr
        if abs(sr) >= abs(vr):
            cr += (sr - tmp) + vr
        else:
            cr += (vr - tmp) + sr
        sr = tmp
        tmp = si + vi
        if abs(si) >= abs(vi):
            ci += (si - tmp) + vi
        else:
            ci += (vi - tmp) + si
        si = tmp
    return complex(sr + cr, si + ci)
