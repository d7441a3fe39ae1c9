# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; behavioral twin of the pure-Python fallback module."""

from libc.math cimport INFINITY, atan2, cos, exp, log, sin, sqrt

import numpy as np

BACKEND = "cython"

cdef double PI = 3.141592653589793238462643383279502884


def s_sum(nu, M):
    """Kahan-compensated long-range coupling sum, rho = 1 .. (M-1)/2."""
    cdef Py_ssize_t m = M
    cdef Py_ssize_t half = (m - 1) // 2
    cdef Py_ssize_t r
    cdef double knu = 2.0 * PI * (<double> nu) / m
    cdef double w = PI / m
    cdef double total = 0.0, carry = 0.0
    cdef double si, term, y, t
    for r in range(1, half + 1):
        si = sin(w * r)
        term = cos(knu * r) / (si * si)
        y = term - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return w * w * total


def s_table_half(M):
    """S_nu for nu = 0 .. (M-1)/2, compensated along the rho axis."""
    cdef Py_ssize_t m = M
    cdef Py_ssize_t half = (m - 1) // 2
    cdef Py_ssize_t r, n
    total_arr = np.zeros(half + 1)
    carry_arr = np.zeros(half + 1)
    cdef double[::1] total = total_arr
    cdef double[::1] carry = carry_arr
    cdef double w = PI / m
    cdef double si, inv, ang, term, y, t
    for r in range(1, half + 1):
        si = sin(w * r)
        inv = 1.0 / (si * si)
        ang = 2.0 * PI * r / m
        for n in range(half + 1):
            term = cos(ang * n) * inv
            y = term - carry[n]
            t = total[n] + y
            carry[n] = (t - total[n]) - y
            total[n] = t
    return total_arr * (w * w)


cdef inline double _box(double A, double a, double b) nogil:
    # (1/pi) int_0^pi dk / (a k^2 + b k + A); caller guarantees A > 0
    cdef double disc = b * b - 4.0 * a * A
    cdef double two_api_b = 2.0 * a * PI + b
    cdef double s, j
    if disc < 0.0:
        s = sqrt(-disc)
        j = 2.0 / s * (atan2(two_api_b, s) - atan2(b, s))
    elif disc > 0.0:
        s = sqrt(disc)
        j = log((two_api_b - s) * (b + s) * (b + s)
                / ((two_api_b + s) * 4.0 * a * A)) / s
    else:
        j = 2.0 / b - 1.0 / (a * PI + 0.5 * b)
    return j / PI


def kappa_box(A, Kperp, alpha):
    """Closed-form box-cutoff time-direction propagator integral."""
    cdef double c = A
    if c == 0.0:
        return INFINITY
    return _box(c, <double> Kperp, PI * (<double> alpha))


def kappa_box_many(A, Kperp, alpha):
    """Vectorized kappa_box over an array of gap values A (all > 0)."""
    arr = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    out_arr = np.empty_like(arr)
    cdef const double[::1] av = arr.ravel()
    cdef double[::1] ov = out_arr.ravel()
    cdef double a = Kperp
    cdef double b = PI * (<double> alpha)
    cdef Py_ssize_t i, n = av.shape[0]
    for i in range(n):
        ov[i] = _box(av[i], a, b)
    return out_arr


def mode_decay_sum(ts, gaps, weights):
    """(1/M) sum_nu w_nu exp(-gap_nu t) for each t; M = len(gaps)."""
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    cdef const double[::1] tv = np.ascontiguousarray(ts_arr)
    cdef const double[::1] gv = np.ascontiguousarray(np.asarray(gaps, dtype=np.float64))
    cdef const double[::1] wv = np.ascontiguousarray(np.asarray(weights, dtype=np.float64))
    cdef Py_ssize_t nt = tv.shape[0]
    cdef Py_ssize_t ng = gv.shape[0]
    out_arr = np.empty(nt)
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i, j
    cdef double acc, t
    for i in range(nt):
        t = tv[i]
        acc = 0.0
        for j in range(ng):
            acc += wv[j] * exp(-gv[j] * t)
        ov[i] = acc / ng
    return out_arr
