# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numeric hot loops; same signatures as _pykernels."""
from libc.math cimport exp, log, lgamma, cos, sin, INFINITY


def dirichlet_sum(double[::1] log_lengths, double[::1] mults, double s_re, double s_im):
    cdef Py_ssize_t k, n = log_lengths.shape[0]
    cdef double re = 0.0, im = 0.0, mag, ph
    for k in range(n):
        mag = mults[k] * exp(s_re * log_lengths[k])
        ph = s_im * log_lengths[k]
        re += mag * cos(ph)
        im += mag * sin(ph)
    return complex(re, im)


def log_binomials(long k1, long k2, Py_ssize_t n_terms):
    cdef Py_ssize_t i
    cdef double a, b
    cdef double[::1] view
    import array
    arr = array.array("d", bytes(8 * n_terms))
    view = arr
    for i in range(n_terms):
        a = (i + 1) * k2
        b = (i + 1) * k1
        view[i] = lgamma(a + 1.0) - lgamma(b + 1.0) - lgamma(a - b + 1.0)
    return arr


def partition_log_sum(double[::1] log_coeffs, long k2, double s, double log_base):
    cdef Py_ssize_t i, n = log_coeffs.shape[0]
    cdef double step = k2 * s * log_base
    cdef double best = -INFINITY, v, acc = 0.0
    for i in range(n):
        v = log_coeffs[i] - step * (i + 1)
        if v > best:
            best = v
    if best == -INFINITY:
        return best
    for i in range(n):
        acc += exp(log_coeffs[i] - step * (i + 1) - best)
    return best + log(acc)
