# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the split-step solver.

Each routine mirrors a function of the same name in ``_kernels_py``.
"""

import numpy as np

from libc.math cimport cos, sin, isfinite

BACKEND = "cython"


def cmul(psi, factor):
    """psi *= factor, in place."""
    # numpy's complex multiply loop is already SIMD; a scalar loop here loses to it
    np.multiply(psi, factor, out=psi)


def phase_rotate(double complex[::1] psi, const double[::1] potential, double dz):
    """psi *= exp(-i potential dz), in place."""
    cdef Py_ssize_t j, n = psi.shape[0]
    if n == 0:
        return
    cdef double* a = <double*> &psi[0]
    cdef double th, c, s, ar, ai
    for j in range(n):
        th = -potential[j] * dz
        c = cos(th)
        s = sin(th)
        ar = a[2 * j]
        ai = a[2 * j + 1]
        a[2 * j] = ar * c - ai * s
        a[2 * j + 1] = ar * s + ai * c


def intensity(const double complex[::1] psi, double[::1] out):
    cdef Py_ssize_t j, n = psi.shape[0]
    for j in range(n):
        out[j] = psi[j].real * psi[j].real + psi[j].imag * psi[j].imag


def moments(const double complex[::1] psi, const double[::1] x, double dx):
    """Return (power, centroid, variance) of |psi|^2 using a shifted two-pass sum."""
    cdef Py_ssize_t j, n = psi.shape[0]
    cdef double w, m0 = 0.0, m1 = 0.0, m2 = 0.0, mean, d
    for j in range(n):
        w = psi[j].real * psi[j].real + psi[j].imag * psi[j].imag
        m0 += w
        m1 += w * x[j]
    mean = m1 / m0
    for j in range(n):
        w = psi[j].real * psi[j].real + psi[j].imag * psi[j].imag
        d = x[j] - mean
        m2 += w * d * d
    return m0 * dx, mean, m2 / m0


def edge_mass(const double complex[::1] psi, Py_ssize_t n_edge, double dx):
    """Power in the first and last ``n_edge`` samples; NaN if any sample is non-finite."""
    cdef Py_ssize_t j, n = psi.shape[0]
    cdef double total = 0.0
    for j in range(n):
        if not (isfinite(psi[j].real) and isfinite(psi[j].imag)):
            return float("nan")
    for j in range(n_edge):
        total += psi[j].real * psi[j].real + psi[j].imag * psi[j].imag
    for j in range(n - n_edge, n):
        total += psi[j].real * psi[j].real + psi[j].imag * psi[j].imag
    return total * dx
