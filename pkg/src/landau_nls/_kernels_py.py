"""Pure-numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable and as the
reference the extension is checked against.
"""

import math

import numpy as np

BACKEND = "python"

# rows of the kernel matrix held in memory at once
_BLOCK = 256


def pointwise_power(u, sigma):
    """``|u|^(2 sigma) u`` elementwise."""
    a2 = u.real * u.real + u.imag * u.imag
    return a2 ** sigma * u


def nonlinear_phase(u, tau_lambda, sigma):
    """Exact flow of ``i du/dt = lambda |u|^(2 sigma) u`` over ``tau``."""
    a2 = u.real * u.real + u.imag * u.imag
    return np.exp(-1j * tau_lambda * a2 ** sigma) * u


def lll_kernel_apply(x1, x2, u, weight, threads=1):
    npts = x1.shape[0]
    g = u * np.exp(-0.25 * (x1 * x1 + x2 * x2)) * (weight / (2.0 * math.pi))
    v = x1 + 1j * x2
    w = x1 - 1j * x2
    out = np.empty(npts, dtype=complex)
    keep = np.abs(u) > 0.0
    g, v = g[keep], v[keep]
    for start in range(0, npts, _BLOCK):
        stop = min(start + _BLOCK, npts)
        wb = w[start:stop, None]
        # exponent combines exp(-|w|^2/4) so each entry is bounded by 1
        expo = 0.5 * wb * v[None, :] - 0.25 * (wb * wb.conj()).real
        out[start:stop] = np.exp(expo) @ g
    return out
