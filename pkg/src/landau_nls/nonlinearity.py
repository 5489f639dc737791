"""Power nonlinearity, its Landau-filtered form and the theta average.

The filtered nonlinearity is

    F(theta, u) = e^{i theta H} ( |e^{-i theta H} u|^(2 sigma) e^{-i theta H} u )

projected back onto the kept Landau modes.  On a truncation with levels
``0..N`` it is a trigonometric polynomial in theta with frequencies at most
``(sigma + 1) N``, so an equispaced rule with more nodes than that averages
it exactly.
"""

from __future__ import annotations

import itertools
import math
import warnings

import numpy as np

from . import kernels
from .basis import BasisTables, level_phase_factors
from .field import Field, QuadratureWarning, default_theta_nodes

__all__ = [
    "F_av_quadrature",
    "F_av_resonant_oracle",
    "F_theta",
    "ThetaQuadrature",
    "nonlinear_phase_step",
    "pointwise_power",
    "spectral_leakage",
]

ORACLE_MAX_LEVEL = 2
ORACLE_MAX_DEGEN = 2
ORACLE_MAX_Z = 4


class ThetaQuadrature:
    """Equispaced rule ``theta_j = 2 pi j / J`` with weights ``1/J``."""

    def __init__(self, J: int):
        if J < 1:
            raise ValueError("need at least one theta node")
        self.J = int(J)
        self.nodes = 2.0 * np.pi * np.arange(self.J) / self.J
        self._phases = {}

    def exact_for(self, sigma: int, n_max: int) -> bool:
        return self.J >= default_theta_nodes(sigma, n_max)

    def phases(self, n_levels: int) -> np.ndarray:
        """``exp(-i theta_j (n + 1/2))`` with shape ``(J, n_levels)``."""
        ph = self._phases.get(n_levels)
        if ph is None:
            ph = np.stack([level_phase_factors(n_levels, t) for t in self.nodes])
            self._phases[n_levels] = ph
        return ph


def pointwise_power(u, sigma: int) -> np.ndarray:
    """``|u|^(2 sigma) u``."""
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    return kernels.pointwise_power(u, sigma)


def nonlinear_phase_step(u, tau: float, lam: float, sigma: int) -> np.ndarray:
    """Exact flow ``u -> exp(-i tau lam |u|^(2 sigma)) u``; keeps |u| pointwise."""
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    return kernels.nonlinear_phase(u, tau * lam, sigma)


# -- raw coefficient kernels used by the solvers -------------------------------

def _synth(c: np.ndarray, tables: BasisTables) -> np.ndarray:
    return tables.values.T @ c.reshape(c.shape[0] * c.shape[1], -1)


def _analyze(u: np.ndarray, tables: BasisTables, shape) -> np.ndarray:
    return (tables.analysis_matrix @ u).reshape(shape)


def projected_power(c: np.ndarray, tables: BasisTables, sigma: int) -> np.ndarray:
    """Galerkin projection of ``|u|^(2 sigma) u`` for coefficients ``c``."""
    return _analyze(kernels.pointwise_power(_synth(c, tables), sigma), tables, c.shape)


def projected_phase(c: np.ndarray, tables: BasisTables, tau_lam: float, sigma: int) -> np.ndarray:
    """Galerkin projection of the exact pointwise phase flow."""
    return _analyze(kernels.nonlinear_phase(_synth(c, tables), tau_lam, sigma), tables, c.shape)


def f_theta_coefs(c: np.ndarray, tables: BasisTables, sigma: int, theta: float) -> np.ndarray:
    ph = level_phase_factors(c.shape[0], theta)[:, None, None]
    return ph.conj() * projected_power(ph * c, tables, sigma)


def f_av_coefs(c: np.ndarray, tables: BasisTables, sigma: int, quad: ThetaQuadrature) -> np.ndarray:
    """Theta average of the filtered nonlinearity, all nodes in one batch."""
    L, K, Z = c.shape
    J = quad.J
    ph = quad.phases(L)                                   # (J, L)
    x = ph[:, :, None, None] * c[None]                    # (J, L, K, Z)
    x = np.moveaxis(x, 0, 2).reshape(L * K, J * Z)
    u = tables.values.T @ x
    p = kernels.pointwise_power(u, sigma)
    a = (tables.analysis_matrix @ p).reshape(L, K, J, Z)
    a *= ph.conj().T[:, None, :, None]
    return a.mean(axis=2)


def spectral_leakage(c: np.ndarray, tables: BasisTables, sigma: int, dz: float) -> float:
    """Mass of the part of ``|u|^(2 sigma) u`` discarded by the Galerkin projection."""
    u = _synth(c, tables)
    p = kernels.pointwise_power(u, sigma)
    back = tables.values.T @ (tables.analysis_matrix @ p)
    r = p - back
    return float(np.sum(r.real ** 2 + r.imag ** 2)) * tables.weight * dz


# -- Field-level operations -----------------------------------------------------

def F_theta(field: Field, theta: float, sigma: int) -> Field:
    return field.with_coefs(f_theta_coefs(field.coefs, field.basis, sigma, theta))


def F_av_quadrature(field: Field, sigma: int, J: int | None = None) -> Field:
    """``(1/J) sum_j F(theta_j, u)``.

    Emits :class:`QuadratureWarning` (and still computes) when ``J`` is below
    ``2 (sigma + 1) (n_max + 1)``.
    """
    n_max = field.coefs.shape[0] - 1
    if J is None:
        J = default_theta_nodes(sigma, n_max)
    quad = ThetaQuadrature(J)
    if not quad.exact_for(sigma, n_max):
        warnings.warn(f"J={J} below the exactness rule "
                      f"{default_theta_nodes(sigma, n_max)}", QuadratureWarning, stacklevel=2)
    return field.with_coefs(f_av_coefs(field.coefs, field.basis, sigma, quad))


def F_av_resonant_oracle(field: Field, sigma: int = 1) -> Field:
    """Brute-force average through the resonant multilinear expansion.

    Expands ``|u|^2 u`` over mode quadruples ``(a, b, c, d)`` with interaction
    integrals ``T_abcd = int conj(phi_a) conj(phi_b) phi_c phi_d`` and keeps
    only quadruples with ``n_a + n_b == n_c + n_d``.  Only for tiny
    truncations and ``sigma == 1``.
    """
    if sigma != 1:
        raise ValueError("resonant oracle is implemented for sigma == 1 only")
    s = field.basis.spec
    if s.n_max > ORACLE_MAX_LEVEL or s.k_max > ORACLE_MAX_DEGEN or field.grid.z_points > ORACLE_MAX_Z:
        raise ValueError("instance too large for the resonant oracle")
    tables = field.basis
    modes = s.modes()
    phi = tables.values
    w = tables.weights
    M = len(modes)
    coef = field.coefs.reshape(M, -1)
    out = np.zeros_like(coef)
    for a, b, c, d in itertools.product(range(M), repeat=4):
        if modes[a].n + modes[b].n != modes[c].n + modes[d].n:
            continue
        t = np.sum(w * phi[a].conj() * phi[b].conj() * phi[c] * phi[d])
        out[a] += t * coef[b].conj() * coef[c] * coef[d]
    return field.with_coefs(out.reshape(field.coefs.shape))


def theta_exactness_gap(field: Field, sigma: int, J: int) -> float:
    """L2 distance between the J-node and 2J-node averages."""
    a = F_av_quadrature(field, sigma, J).coefs
    b = F_av_quadrature(field, sigma, 2 * J).coefs
    return math.sqrt(float(np.sum(np.abs(a - b) ** 2)) * field.grid.dz)
