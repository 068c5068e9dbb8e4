# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled path kernels: scalar loops over paths and steps.

Same signatures and arithmetic as _kernels_py; the step expression is
written with the same association so the two backends agree to the last
few ulps (bit-exactly for p = 1/2, where both use a correctly rounded
sqrt).
"""

from libc.math cimport sqrt, pow, fabs

import numpy as np

BACKEND = "compiled"


def em_block(double x0, double mu, double sigma, double p, double dt, xi):
    cdef double[:, ::1] z = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t npaths = z.shape[0], nsteps = z.shape[1]
    term_arr = np.empty(npaths, dtype=np.float64)
    absorb_arr = np.full(npaths, -1, dtype=np.int64)
    amax_arr = np.empty(npaths, dtype=np.float64)
    cdef double[::1] term = term_arr
    cdef long long[::1] absorb = absorb_arr
    cdef double[::1] amax = amax_arr

    cdef double muh = mu * dt
    cdef double sigh = sigma * sqrt(dt)
    cdef bint half = (p == 0.5)
    cdef Py_ssize_t j, k
    cdef double x, g, a, am
    cdef long long ai

    with nogil:
        for j in range(npaths):
            x = x0
            am = fabs(x0)
            ai = -1
            for k in range(nsteps):
                # running paths have x > 0, so x^+ == x here
                g = sqrt(x) if half else pow(x, p)
                x = x + muh * x + (sigh * g) * z[j, k]
                a = fabs(x)
                if a > am:
                    am = a
                if x <= 0.0:
                    ai = k + 1
                    break
            term[j] = x
            absorb[j] = ai
            amax[j] = am
    return term_arr, absorb_arr, amax_arr


def em_block_full(double x0, double mu, double sigma, double p, double dt, xi):
    cdef double[:, ::1] z = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t npaths = z.shape[0], nsteps = z.shape[1]
    values_arr = np.empty((npaths, nsteps + 1), dtype=np.float64)
    absorb_arr = np.full(npaths, -1, dtype=np.int64)
    cdef double[:, ::1] values = values_arr
    cdef long long[::1] absorb = absorb_arr

    cdef double muh = mu * dt
    cdef double sigh = sigma * sqrt(dt)
    cdef bint half = (p == 0.5)
    cdef Py_ssize_t j, k
    cdef double x, g
    cdef long long ai

    with nogil:
        for j in range(npaths):
            x = x0
            ai = -1
            values[j, 0] = x
            for k in range(nsteps):
                if ai < 0:
                    g = sqrt(x) if half else pow(x, p)
                    x = x + muh * x + (sigh * g) * z[j, k]
                    if x <= 0.0:
                        ai = k + 1
                values[j, k + 1] = x
            absorb[j] = ai
    return values_arr, absorb_arr


def trunc_block(double x0, double mu, double sigma, double p, double floor,
                double dt, xi):
    cdef double[:, ::1] z = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t npaths = z.shape[0], nsteps = z.shape[1]
    term_arr = np.empty(npaths, dtype=np.float64)
    stop_arr = np.full(npaths, -1, dtype=np.int64)
    cdef double[::1] term = term_arr
    cdef long long[::1] stop = stop_arr

    cdef double muh = mu * dt
    cdef double sigh = sigma * sqrt(dt)
    cdef bint half = (p == 0.5)
    cdef Py_ssize_t j, k
    cdef double x, c, g
    cdef long long si

    with nogil:
        for j in range(npaths):
            x = x0
            si = -1
            for k in range(nsteps):
                c = x if x > floor else floor  # running: x > floor > 0
                g = sqrt(c) if half else pow(c, p)
                x = x + muh * x + (sigh * g) * z[j, k]
                if x <= floor:
                    si = k + 1
                    break
            term[j] = x
            stop[j] = si
    return term_arr, stop_arr
