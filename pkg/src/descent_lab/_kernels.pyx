# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Must stay result-compatible with ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint32_t, uint64_t
from libc.math cimport fabs

cnp.import_array()

BACKEND = "cython"

cdef uint64_t PCG_MULT = 6364136223846793005ULL


cdef inline uint32_t _pcg32(uint64_t* state, uint64_t inc) noexcept nogil:
    cdef uint64_t old = state[0]
    state[0] = old * PCG_MULT + inc
    cdef uint32_t xorshifted = <uint32_t>(((old >> 18) ^ old) >> 27)
    cdef uint32_t rot = <uint32_t>(old >> 59)
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31))


cdef inline uint32_t _bounded(uint64_t* state, uint64_t inc, uint32_t bound) noexcept nogil:
    cdef uint32_t threshold = (-bound) % bound
    cdef uint32_t r
    while True:
        r = _pcg32(state, inc)
        if r >= threshold:
            return r % bound


def pcg32_fill(uint64_t state, uint64_t inc, Py_ssize_t n):
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] out = np.empty(n, dtype=np.uint32)
    cdef uint32_t[::1] view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = _pcg32(&state, inc)
    return out, state


def pcg32_permutation(uint64_t state, uint64_t inc, Py_ssize_t n):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] perm = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] p = perm
    cdef Py_ssize_t i, j
    cdef cnp.int64_t tmp
    with nogil:
        for i in range(n - 1, 0, -1):
            j = _bounded(&state, inc, <uint32_t>(i + 1))
            tmp = p[i]
            p[i] = p[j]
            p[j] = tmp
    return perm, state


def prox_update(double[::1] theta, const double[::1] grad, double lr, double thresh):
    cdef Py_ssize_t i, n = theta.shape[0]
    cdef double v
    with nogil:
        for i in range(n):
            v = theta[i] - lr * grad[i]
            if v > thresh:
                theta[i] = v - thresh
            elif v < -thresh:
                theta[i] = v + thresh
            else:
                theta[i] = 0.0


def subgradient_update(double[::1] theta, const double[::1] grad, double lr, double alpha):
    cdef Py_ssize_t i, n = theta.shape[0]
    cdef double s
    with nogil:
        for i in range(n):
            s = 0.0
            if theta[i] > 0.0:
                s = 1.0
            elif theta[i] < 0.0:
                s = -1.0
            theta[i] = theta[i] - lr * (grad[i] + alpha * s)


def cd_sweep(const double[::1, :] x, double[::1] beta, double[::1] resid,
             const double[::1] col_sq, double lam):
    """One cyclic pass of LASSO coordinate descent; returns the max |change|."""
    cdef Py_ssize_t n = x.shape[0], p = x.shape[1]
    cdef Py_ssize_t i, j
    cdef double inv_n = 1.0 / n
    cdef double dot, rho, curv, old, new, delta, max_change = 0.0
    with nogil:
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            old = beta[j]
            dot = 0.0
            for i in range(n):
                dot = dot + x[i, j] * resid[i]
            curv = col_sq[j] * inv_n
            rho = dot * inv_n + curv * old
            if rho > lam:
                new = (rho - lam) / curv
            elif rho < -lam:
                new = (rho + lam) / curv
            else:
                new = 0.0
            delta = new - old
            if delta != 0.0:
                for i in range(n):
                    resid[i] = resid[i] - x[i, j] * delta
                beta[j] = new
                if fabs(delta) > max_change:
                    max_change = fabs(delta)
    return max_change
