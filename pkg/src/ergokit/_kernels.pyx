# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; contracts documented in ergokit._kernels_py."""

from libc.math cimport fabs


def mc_max_ratio(double[:, ::1] TK, double[:, ::1] K, double[:, ::1] Z,
                 double min_den=1e-300):
    cdef Py_ssize_t m = Z.shape[0]
    cdef Py_ssize_t n = Z.shape[1]
    cdef Py_ssize_t i, r, c
    cdef double num, den, acc, ratio
    cdef double best = -1.0
    cdef Py_ssize_t best_i = -1
    for i in range(m):
        num = 0.0
        den = 0.0
        for r in range(n):
            acc = 0.0
            for c in range(n):
                acc += TK[r, c] * Z[i, c]
            num += fabs(acc)
            acc = 0.0
            for c in range(n):
                acc += K[r, c] * Z[i, c]
            den += fabs(acc)
        if den > min_den:
            ratio = num / den
            if ratio > best:
                best = ratio
                best_i = i
    return best, best_i


def max_pair_half_l1(double[:, ::1] R):
    cdef Py_ssize_t k = R.shape[0]
    cdef Py_ssize_t n = R.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double s
    cdef double best = -1.0
    cdef Py_ssize_t bi = -1, bj = -1
    if k < 2:
        return 0.0, -1, -1
    for i in range(k):
        for j in range(i + 1, k):
            s = 0.0
            for c in range(n):
                s += fabs(R[i, c] - R[j, c])
            s *= 0.5
            if s > best:
                best = s
                bi = i
                bj = j
    return best, bi, bj
