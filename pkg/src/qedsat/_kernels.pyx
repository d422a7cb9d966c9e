# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop of the normalized map iteration."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log

cnp.import_array()


def iterate_sequence(const double complex[:, :, ::1] mats, const long long[::1] index,
                     const double complex[::1] x0, double tiny):
    """Apply mats[index[k]] and renormalize, for k = 0..n-1.

    Returns (states[n+1, 4], concurrence[n+1], log_norms[n], failed_step).
    failed_step is -1 unless some pre-normalization norm fell below ``tiny``.
    """
    cdef Py_ssize_t n = index.shape[0]
    cdef Py_ssize_t k, i, j
    cdef long long m
    cdef double nrm
    cdef double complex acc
    cdef double complex y[4]
    states_arr = np.empty((n + 1, 4), dtype=np.complex128)
    conc_arr = np.empty(n + 1, dtype=np.float64)
    logn_arr = np.empty(n, dtype=np.float64)
    cdef double complex[:, ::1] states = states_arr
    cdef double[::1] conc = conc_arr
    cdef double[::1] logn = logn_arr
    for i in range(4):
        states[0, i] = x0[i]
    conc[0] = _conc(states, 0)
    for k in range(n):
        m = index[k]
        nrm = 0.0
        for i in range(4):
            acc = 0.0
            for j in range(4):
                acc = acc + mats[m, i, j] * states[k, j]
            y[i] = acc
            nrm += acc.real * acc.real + acc.imag * acc.imag
        nrm = sqrt(nrm)
        if not (nrm > tiny):
            return states_arr[: k + 1], conc_arr[: k + 1], logn_arr[:k], k
        for i in range(4):
            states[k + 1, i] = y[i] / nrm
        logn[k] = log(nrm)
        conc[k + 1] = _conc(states, k + 1)
    return states_arr, conc_arr, logn_arr, -1


cdef inline double _conc(double complex[:, ::1] s, Py_ssize_t k):
    cdef double complex w = s[k, 0] * s[k, 3] - s[k, 1] * s[k, 2]
    cdef double c = 2.0 * sqrt(w.real * w.real + w.imag * w.imag)
    if c > 1.0:
        return 1.0
    return c
