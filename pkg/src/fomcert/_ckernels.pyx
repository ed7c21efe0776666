# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot inner-loop kernels."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, exp, log

cnp.import_array()

IMPLEMENTATION = "cython"


def soft_threshold(cnp.ndarray[cnp.float64_t, ndim=1] v, double tau):
    cdef Py_ssize_t i, n = v.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double a
    for i in range(n):
        a = fabs(v[i]) - tau
        if a <= 0.0:
            out[i] = 0.0
        elif v[i] > 0.0:
            out[i] = a
        else:
            out[i] = -a
    return out


def project_simplex(cnp.ndarray[cnp.float64_t, ndim=1] v):
    cdef Py_ssize_t i, n = v.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.sort(v)[::-1].copy()
    cdef double css = 0.0, lam = 0.0
    cdef Py_ssize_t rho = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] csum = np.empty(n)
    for i in range(n):
        css += u[i]
        csum[i] = css
    for i in range(n):
        if u[i] * (i + 1) > csum[i] - 1.0:
            rho = i
    lam = (csum[rho] - 1.0) / (rho + 1.0)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double x
    for i in range(n):
        x = v[i] - lam
        out[i] = x if x > 0.0 else 0.0
    return out


def entropy_prox_simplex(cnp.ndarray[cnp.float64_t, ndim=1] log_s_prev,
                         cnp.ndarray[cnp.float64_t, ndim=1] tc):
    cdef Py_ssize_t i, n = log_s_prev.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.empty(n)
    cdef double m = -1e308, z = 0.0
    for i in range(n):
        w[i] = log_s_prev[i] - tc[i]
        if w[i] > m:
            m = w[i]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    for i in range(n):
        out[i] = exp(w[i] - m)
        z += out[i]
    for i in range(n):
        out[i] /= z
    return out, m + log(z)


def sq_euclid_bregman(cnp.ndarray[cnp.float64_t, ndim=1] s,
                      cnp.ndarray[cnp.float64_t, ndim=1] z):
    cdef Py_ssize_t i, n = s.shape[0]
    cdef double acc = 0.0, d
    for i in range(n):
        d = s[i] - z[i]
        acc += d * d
    return 0.5 * acc


def entropy_bregman(cnp.ndarray[cnp.float64_t, ndim=1] s,
                    cnp.ndarray[cnp.float64_t, ndim=1] z):
    cdef Py_ssize_t i, n = s.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        if s[i] > 0.0:
            acc += s[i] * log(s[i] / z[i])
        acc += z[i] - s[i]
    return acc


def burg_bregman(cnp.ndarray[cnp.float64_t, ndim=1] s,
                 cnp.ndarray[cnp.float64_t, ndim=1] z):
    cdef Py_ssize_t i, n = s.shape[0]
    cdef double acc = 0.0, r
    for i in range(n):
        r = s[i] / z[i]
        acc += r - log(r) - 1.0
    return acc
