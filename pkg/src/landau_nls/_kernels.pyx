# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pointwise nonlinearities and the LLL kernel sum."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport exp, cos, sin, pow, M_PI

cnp.import_array()

BACKEND = "cython"


def pointwise_power(const double complex[::1] u, int sigma):
    cdef Py_ssize_t i, n = u.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double a2, f
    cdef int s
    with nogil:
        for i in range(n):
            a2 = u[i].real * u[i].real + u[i].imag * u[i].imag
            f = 1.0
            for s in range(sigma):
                f = f * a2
            o[i] = f * u[i]
    return out


def nonlinear_phase(const double complex[::1] u, double tau_lambda, int sigma):
    cdef Py_ssize_t i, n = u.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double a2, f, ph, c, s_, re, im
    cdef int s
    with nogil:
        for i in range(n):
            re = u[i].real
            im = u[i].imag
            a2 = re * re + im * im
            f = 1.0
            for s in range(sigma):
                f = f * a2
            ph = tau_lambda * f
            c = cos(ph)
            s_ = sin(ph)
            o[i].real = c * re + s_ * im
            o[i].imag = c * im - s_ * re
    return out


def lll_kernel_apply(const double[::1] x1, const double[::1] x2,
                     const double complex[::1] u, double weight, int threads=1):
    cdef Py_ssize_t n = x1.shape[0]
    cdef Py_ssize_t i, j, nk = 0
    cdef double pref = weight / (2.0 * M_PI)
    cdef double gv
    # gather the support of u once
    gre_a = np.empty(n)
    gim_a = np.empty(n)
    vx_a = np.empty(n)
    vy_a = np.empty(n)
    cdef double[::1] gre = gre_a, gim = gim_a, vx = vx_a, vy = vy_a
    for j in range(n):
        if u[j].real != 0.0 or u[j].imag != 0.0:
            gv = pref * exp(-0.25 * (x1[j] * x1[j] + x2[j] * x2[j]))
            gre[nk] = gv * u[j].real
            gim[nk] = gv * u[j].imag
            vx[nk] = x1[j]
            vy[nk] = x2[j]
            nk += 1
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double wx, wy, er, ei, mag, c, s, accr, acci
    cdef int nthreads = threads if threads > 0 else 1
    for i in prange(n, nogil=True, num_threads=nthreads, schedule="static"):
        wx = x1[i]
        wy = x2[i]
        accr = 0.0
        acci = 0.0
        for j in range(nk):
            # terms with |w - v|^2 > 160 are below exp(-40) of the peak
            if (wx - vx[j]) * (wx - vx[j]) + (wy - vy[j]) * (wy - vy[j]) > 160.0:
                continue
            # conj(w) v / 2 - |w|^2 / 4
            er = 0.5 * (wx * vx[j] + wy * vy[j]) - 0.25 * (wx * wx + wy * wy)
            ei = 0.5 * (wx * vy[j] - wy * vx[j])
            mag = exp(er)
            c = mag * cos(ei)
            s = mag * sin(ei)
            accr = accr + c * gre[j] - s * gim[j]
            acci = acci + c * gim[j] + s * gre[j]
        o[i].real = accr
        o[i].imag = acci
    return out
