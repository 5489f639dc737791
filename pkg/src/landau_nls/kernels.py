"""Hot-kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
versions in :mod:`._kernels_py` are used.  Set ``LANDAU_NLS_KERNELS=python``
to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("LANDAU_NLS_KERNELS", "").lower() == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND


def _flat(u):
    u = np.ascontiguousarray(u, dtype=np.complex128)
    return u.reshape(-1), u.shape


def pointwise_power(u, sigma):
    flat, shape = _flat(u)
    return np.asarray(_impl.pointwise_power(flat, int(sigma))).reshape(shape)


def nonlinear_phase(u, tau_lambda, sigma):
    flat, shape = _flat(u)
    return np.asarray(_impl.nonlinear_phase(flat, float(tau_lambda), int(sigma))).reshape(shape)


def lll_kernel_apply(x1, x2, u, weight, threads=1):
    return np.asarray(_impl.lll_kernel_apply(x1, x2, u, float(weight), int(threads)))
