# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dense-network kernels.

Plain C loops beat BLAS dispatch at the tiny matrix sizes used here
(inputs of a few dozen features, 64-unit layers, single-observation
forward passes in the rollout loop).
"""

import numpy as np

from libc.math cimport tanh

NAME = "compiled"


def forward(double[:, ::1] w1, double[::1] b1,
            double[:, ::1] w2, double[::1] b2,
            double[:, ::1] wp, double[::1] bp,
            double[::1] wv, double[::1] bv,
            double[:, ::1] x):
    cdef Py_ssize_t B = x.shape[0]
    cdef Py_ssize_t n_in = x.shape[1]
    cdef Py_ssize_t H1 = w1.shape[0]
    cdef Py_ssize_t H2 = w2.shape[0]
    cdef Py_ssize_t A = wp.shape[0]
    h1_arr = np.empty((B, H1), dtype=np.float64)
    h2_arr = np.empty((B, H2), dtype=np.float64)
    logits_arr = np.empty((B, A), dtype=np.float64)
    values_arr = np.empty(B, dtype=np.float64)
    cdef double[:, ::1] h1 = h1_arr
    cdef double[:, ::1] h2 = h2_arr
    cdef double[:, ::1] logits = logits_arr
    cdef double[::1] values = values_arr
    cdef Py_ssize_t b, i, j, k
    cdef double acc
    with nogil:
        for b in range(B):
            for j in range(H1):
                acc = b1[j]
                for k in range(n_in):
                    acc += w1[j, k] * x[b, k]
                h1[b, j] = tanh(acc)
            for j in range(H2):
                acc = b2[j]
                for k in range(H1):
                    acc += w2[j, k] * h1[b, k]
                h2[b, j] = tanh(acc)
            for i in range(A):
                acc = bp[i]
                for k in range(H2):
                    acc += wp[i, k] * h2[b, k]
                logits[b, i] = acc
            acc = bv[0]
            for k in range(H2):
                acc += wv[k] * h2[b, k]
            values[b] = acc
    return logits_arr, values_arr, h1_arr, h2_arr


def backward(double[:, ::1] w1, double[:, ::1] w2,
             double[:, ::1] wp, double[::1] wv,
             double[:, ::1] x, double[:, ::1] h1, double[:, ::1] h2,
             double[:, ::1] dlogits, double[::1] dvalues):
    cdef Py_ssize_t B = x.shape[0]
    cdef Py_ssize_t n_in = x.shape[1]
    cdef Py_ssize_t H1 = w1.shape[0]
    cdef Py_ssize_t H2 = w2.shape[0]
    cdef Py_ssize_t A = wp.shape[0]
    gw1_arr = np.zeros((H1, n_in), dtype=np.float64)
    gb1_arr = np.zeros(H1, dtype=np.float64)
    gw2_arr = np.zeros((H2, H1), dtype=np.float64)
    gb2_arr = np.zeros(H2, dtype=np.float64)
    gwp_arr = np.zeros((A, H2), dtype=np.float64)
    gbp_arr = np.zeros(A, dtype=np.float64)
    gwv_arr = np.zeros(H2, dtype=np.float64)
    gbv_arr = np.zeros(1, dtype=np.float64)
    dz2_arr = np.empty(H2, dtype=np.float64)
    dz1_arr = np.empty(H1, dtype=np.float64)
    cdef double[:, ::1] gw1 = gw1_arr
    cdef double[::1] gb1 = gb1_arr
    cdef double[:, ::1] gw2 = gw2_arr
    cdef double[::1] gb2 = gb2_arr
    cdef double[:, ::1] gwp = gwp_arr
    cdef double[::1] gbp = gbp_arr
    cdef double[::1] gwv = gwv_arr
    cdef double[::1] gbv = gbv_arr
    cdef double[::1] dz2 = dz2_arr
    cdef double[::1] dz1 = dz1_arr
    cdef Py_ssize_t b, i, j, k
    cdef double d, dv, acc
    with nogil:
        for b in range(B):
            dv = dvalues[b]
            gbv[0] += dv
            for i in range(A):
                d = dlogits[b, i]
                gbp[i] += d
                for k in range(H2):
                    gwp[i, k] += d * h2[b, k]
            for j in range(H2):
                acc = dv * wv[j]
                for i in range(A):
                    acc += dlogits[b, i] * wp[i, j]
                dz2[j] = acc * (1.0 - h2[b, j] * h2[b, j])
                gwv[j] += dv * h2[b, j]
            for j in range(H2):
                d = dz2[j]
                gb2[j] += d
                for k in range(H1):
                    gw2[j, k] += d * h1[b, k]
            for j in range(H1):
                acc = 0.0
                for i in range(H2):
                    acc += dz2[i] * w2[i, j]
                dz1[j] = acc * (1.0 - h1[b, j] * h1[b, j])
            for j in range(H1):
                d = dz1[j]
                gb1[j] += d
                for k in range(n_in):
                    gw1[j, k] += d * x[b, k]
    return gw1_arr, gb1_arr, gw2_arr, gb2_arr, gwp_arr, gbp_arr, gwv_arr, gbv_arr
