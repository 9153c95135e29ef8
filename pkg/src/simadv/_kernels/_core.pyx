# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled accumulator kernels.

Same contract and same ascending-dimension accumulation order as pure.py,
so results are bit-identical across backends. Keep in lockstep with pure.py.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def sq_dist(const double[:, ::1] points, const double[::1] center):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, i
    cdef double acc, d
    for k in range(m):
        acc = 0.0
        for i in range(n):
            d = points[k, i] - center[i]
            acc += d * d
        out[k] = acc
    return out_arr


def dot(const double[:, ::1] points, const double[::1] direction):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, i
    cdef double acc
    for k in range(m):
        acc = points[k, 0] * direction[0]
        for i in range(1, n):
            acc = acc + points[k, i] * direction[i]
        out[k] = acc
    return out_arr


def scaled_absmax(const double[:, ::1] points, const double[::1] half_widths):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, i
    cdef double acc, v
    for k in range(m):
        v = points[k, 0]
        if v < 0.0:
            v = -v
        acc = v / half_widths[0]
        for i in range(1, n):
            v = points[k, i]
            if v < 0.0:
                v = -v
            v = v / half_widths[i]
            if v > acc:
                acc = v
        out[k] = acc
    return out_arr
