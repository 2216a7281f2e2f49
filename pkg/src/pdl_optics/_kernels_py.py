"""NumPy implementations of the split-step inner loops.

Used when the compiled extension is unavailable or ``PDL_OPTICS_PURE_PYTHON``
is set. Signatures and in-place semantics match ``_kernels.pyx``.
"""

import numpy as np

BACKEND = "numpy"


def cmul(psi, factor):
    np.multiply(psi, factor, out=psi)


def phase_rotate(psi, potential, dz):
    """psi *= exp(-i potential dz), in place."""
    psi *= np.exp(-1j * dz * potential)


def intensity(psi, out):
    np.multiply(psi.real, psi.real, out=out)
    out += psi.imag * psi.imag


def moments(psi, x, dx):
    w = psi.real**2 + psi.imag**2
    m0 = w.sum()
    mean = float(np.dot(w, x) / m0)
    d = x - mean
    return float(m0 * dx), mean, float(np.dot(w, d * d) / m0)


def edge_mass(psi, n_edge, dx):
    if not np.isfinite(psi).all():
        return float("nan")
    head = psi[:n_edge]
    tail = psi[psi.shape[0] - n_edge :]
    return float((np.vdot(head, head).real + np.vdot(tail, tail).real) * dx)
