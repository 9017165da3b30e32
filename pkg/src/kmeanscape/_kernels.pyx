# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: nearest-centre assignment and fixed-assignment
cost/gradient sums. Loops are branch-light and allocation-free."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def assign(const double[:, ::1] points, const double[:, ::1] centres):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t n_f = points.shape[1]
    cdef Py_ssize_t k = centres.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long[::1] labels = out
    cdef Py_ssize_t i, j, f
    cdef double best, d, diff
    for i in range(n):
        best = -1.0
        for j in range(k):
            d = 0.0
            for f in range(n_f):
                diff = points[i, f] - centres[j, f]
                d += diff * diff
            if best < 0.0 or d < best:
                best = d
                labels[i] = j
    return out


def cost(const double[:, ::1] points, const double[:, ::1] centres, const long[::1] labels):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t n_f = points.shape[1]
    cdef Py_ssize_t i, f
    cdef long j
    cdef double total = 0.0, diff
    for i in range(n):
        j = labels[i]
        for f in range(n_f):
            diff = points[i, f] - centres[j, f]
            total += diff * diff
    return total


def cost_and_grad(const double[:, ::1] points, const double[:, ::1] centres, const long[::1] labels):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t n_f = points.shape[1]
    cdef Py_ssize_t k = centres.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad_arr = np.zeros((k, n_f))
    cdef double[:, ::1] grad = grad_arr
    cdef Py_ssize_t i, f
    cdef long j
    cdef double total = 0.0, diff
    for i in range(n):
        j = labels[i]
        for f in range(n_f):
            diff = centres[j, f] - points[i, f]
            total += diff * diff
            grad[j, f] += 2.0 * diff
    return total, grad_arr


def cluster_sums(const double[:, ::1] points, const long[::1] labels, Py_ssize_t k):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t n_f = points.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sums_arr = np.zeros((k, n_f))
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts_arr = np.zeros(k, dtype=np.int64)
    cdef double[:, ::1] sums = sums_arr
    cdef long[::1] counts = counts_arr
    cdef Py_ssize_t i, f
    cdef long j
    for i in range(n):
        j = labels[i]
        counts[j] += 1
        for f in range(n_f):
            sums[j, f] += points[i, f]
    return sums_arr, counts_arr
