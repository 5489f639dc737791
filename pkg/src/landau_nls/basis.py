"""Truncated eigenbasis of the symmetric-gauge Landau Hamiltonian.

The operator is ``H = -1/2 Lap + |x|^2/8 - (i/2) x_perp . grad`` on R^2 with
``x_perp = (-x2, x1)``.  Its eigenfunctions are labelled by the Landau level
``n`` (energy ``n + 1/2``) and a degeneracy index ``k``.  With ``w = x1 + i x2``
and ``m = n - k`` the angular momentum ``-i d/d(arg w)``,

    phi_{n,k}(x) = N_{n,k} exp(i m arg w) r^|m| L^{|m|}_{min(n,k)}(r^2/2) exp(-r^2/4)

so that ``H phi = (n + 1/2) phi`` and the isotropic oscillator
``H0 = -Lap + |x|^2/4`` acts as ``(n + k + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels

__all__ = [
    "BasisSpec",
    "BasisTables",
    "LandauMode",
    "analyze",
    "build_basis",
    "eigen_residual",
    "eigenvalue",
    "level_phase_factors",
    "lll_kernel_project",
    "mode_function",
    "mode_values",
    "project_level",
    "support_half_width",
    "synthesize",
]

# complex entries allowed in a mode table (16 bytes each -> 1 GiB)
DEFAULT_MEMORY_CAP = 1 << 26


def support_half_width(n_max: int, k_max: int) -> float:
    """Smallest transverse half width admitted for a given truncation."""
    return 2.0 * math.sqrt(2.0 * (n_max + k_max) + 1.0) + 4.0


@dataclass(frozen=True)
class BasisSpec:
    n_max: int
    k_max: int
    grid_points_per_axis: int = 128
    half_width_L: float = 12.0
    # opt out of the support rule for resolution studies; orthonormality
    # must then be checked on the tables (BasisTables.gram_deviation)
    check_support: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.n_max < 0 or self.k_max < 0:
            raise ValueError("n_max and k_max must be non-negative")
        npts = self.grid_points_per_axis
        if npts < 8 or npts & (npts - 1):
            raise ValueError(
                f"grid_points_per_axis must be a power of two >= 8, got {npts}")
        need = support_half_width(self.n_max, self.k_max)
        if self.check_support and not self.half_width_L >= need:
            raise ValueError(
                f"half_width_L={self.half_width_L} violates the Gaussian support "
                f"rule L >= {need:.4f} for n_max={self.n_max}, k_max={self.k_max}")

    @property
    def n_modes(self) -> int:
        return (self.n_max + 1) * (self.k_max + 1)

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width_L / self.grid_points_per_axis

    def axis(self) -> np.ndarray:
        """Grid nodes along one transverse axis, periodic on [-L, L)."""
        npts = self.grid_points_per_axis
        return -self.half_width_L + self.dx * np.arange(npts)

    def modes(self) -> list[LandauMode]:
        return [LandauMode(n, k) for n in range(self.n_max + 1)
                for k in range(self.k_max + 1)]

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "k_max": self.k_max,
                "grid_points_per_axis": self.grid_points_per_axis,
                "half_width_L": self.half_width_L}


@dataclass(frozen=True)
class LandauMode:
    n: int
    k: int

    @property
    def energy(self) -> float:
        return eigenvalue(self.n)

    @property
    def angular_momentum(self) -> int:
        return self.n - self.k


@dataclass(frozen=True, eq=False)
class BasisTables:
    """Mode values on the transverse grid.

    ``values`` has shape ``(n_modes, N*N)``; mode ``(n, k)`` sits in row
    ``n*(k_max+1) + k`` and grid point ``(i, j)`` in column ``i*N + j`` with
    ``x1 = axis[i]``, ``x2 = axis[j]``.
    """

    spec: BasisSpec
    values: np.ndarray
    weights: np.ndarray
    x1: np.ndarray = field(repr=False)
    x2: np.ndarray = field(repr=False)

    @cached_property
    def analysis_matrix(self) -> np.ndarray:
        """``conj(phi) * w``; ``analysis_matrix @ u`` gives the coefficients."""
        a = self.values.conj() * self.weights
        a.setflags(write=False)
        return a

    @property
    def weight(self) -> float:
        # uniform trapezoid weight dx^2
        return float(self.weights[0])

    @property
    def shape2d(self) -> tuple[int, int]:
        npts = self.spec.grid_points_per_axis
        return npts, npts

    def index(self, n: int, k: int) -> int:
        s = self.spec
        if not (0 <= n <= s.n_max and 0 <= k <= s.k_max):
            raise ValueError(f"mode ({n}, {k}) outside truncation")
        return n * (s.k_max + 1) + k

    def mode(self, n: int, k: int) -> np.ndarray:
        """Mode values reshaped onto the ``(N, N)`` grid."""
        return self.values[self.index(n, k)].reshape(self.shape2d)

    def gram(self) -> np.ndarray:
        return self.analysis_matrix @ self.values.T

    def gram_deviation(self) -> float:
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(g.shape[0]))))


def level_phase_factors(n_levels: int, theta: float) -> np.ndarray:
    """``exp(-i theta (n + 1/2))`` for ``n = 0..n_levels-1``.

    ``theta`` is reduced modulo 4 pi first; the half-integer spectrum makes
    the factors exactly 4 pi periodic.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError("phase angle must be finite")
    theta = math.fmod(theta, 4.0 * math.pi)
    return np.exp(-1j * theta * (np.arange(n_levels) + 0.5))


def eigenvalue(n: int) -> float:
    """Energy of Landau level ``n``."""
    if n < 0:
        raise ValueError("Landau level must be non-negative")
    return n + 0.5


def _laguerre(p: int, alpha: int, s: np.ndarray) -> np.ndarray:
    """Generalized Laguerre polynomial by upward recurrence in the degree."""
    prev = np.ones_like(s)
    if p == 0:
        return prev
    cur = 1.0 + alpha - s
    for j in range(1, p):
        prev, cur = cur, ((2 * j + 1 + alpha - s) * cur - (j + alpha) * prev) / (j + 1)
    return cur


def _log_norm(n: int, k: int) -> float:
    lo, hi = min(n, k), max(n, k)
    m = hi - lo
    return -0.5 * (math.log(2.0 * math.pi) + m * math.log(2.0)
                   + math.lgamma(hi + 1) - math.lgamma(lo + 1))


def mode_values(n: int, k: int, x1, x2) -> np.ndarray:
    """Vectorized ``phi_{n,k}`` on arrays of coordinates."""
    if n < 0 or k < 0:
        raise ValueError("mode indices must be non-negative")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r2 = x1 * x1 + x2 * x2
    m = n - k
    am = abs(m)
    lag = _laguerre(min(n, k), am, 0.5 * r2)
    # r^|m| e^{-r^2/4} N evaluated in log form; r = 0 handled by where
    with np.errstate(divide="ignore"):
        log_r = 0.5 * np.log(r2)
    expo = _log_norm(n, k) - 0.25 * r2
    if am:
        expo = expo + am * log_r
    radial = np.where(r2 > 0.0, np.exp(expo), math.exp(_log_norm(n, k)) if am == 0 else 0.0)
    # e^{i m arg w} = ((x1 + i x2)/r)^m
    if am:
        w = x1 + 1j * x2
        if m < 0:
            w = np.conj(w)
        rr = np.sqrt(r2)
        unit = np.where(rr > 0.0, w / np.where(rr > 0.0, rr, 1.0), 0.0)
        angular = unit ** am
    else:
        angular = 1.0
    return radial * lag * angular


def mode_function(n: int, k: int, point) -> complex:
    """Normalized eigenfunction ``phi_{n,k}`` at a single point ``(x1, x2)``."""
    x1, x2 = point
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise ValueError("point must be finite")
    return complex(mode_values(n, k, x1, x2))


def build_basis(spec: BasisSpec, memory_cap: int = DEFAULT_MEMORY_CAP) -> BasisTables:
    """Tabulate every kept mode on the uniform ``[-L, L)^2`` grid."""
    npts = spec.grid_points_per_axis
    if spec.n_modes * npts * npts > memory_cap:
        raise MemoryError(
            f"{spec.n_modes} modes x {npts}^2 points exceeds the table cap {memory_cap}")
    ax = spec.axis()
    x1, x2 = np.meshgrid(ax, ax, indexing="ij")
    x1 = x1.ravel()
    x2 = x2.ravel()
    values = np.empty((spec.n_modes, npts * npts), dtype=complex)
    for row, mode in enumerate(spec.modes()):
        values[row] = mode_values(mode.n, mode.k, x1, x2)
    weights = np.full(npts * npts, spec.dx ** 2)
    values.setflags(write=False)
    weights.setflags(write=False)
    return BasisTables(spec=spec, values=values, weights=weights, x1=x1, x2=x2)


def _check_slice(u: np.ndarray, tables: BasisTables) -> np.ndarray:
    npts = tables.spec.grid_points_per_axis
    u = np.asarray(u)
    if u.shape[:2] == (npts, npts):
        return u.reshape((npts * npts,) + u.shape[2:])
    if u.shape[:1] == (npts * npts,):
        return u
    raise ValueError(
        f"field of shape {u.shape} does not match the {npts}x{npts} transverse grid")


def analyze(u, tables: BasisTables) -> np.ndarray:
    """Galerkin coefficients ``c_{n,k} = sum w conj(phi_{n,k}) u``.

    ``u`` is a transverse slice shaped ``(N, N)`` or ``(N*N,)``, optionally
    with trailing axes (e.g. z); the result has shape
    ``(n_max+1, k_max+1) + trailing``.
    """
    flat = _check_slice(u, tables)
    trailing = flat.shape[1:]
    c = tables.analysis_matrix @ flat.reshape(flat.shape[0], -1)
    s = tables.spec
    return c.reshape((s.n_max + 1, s.k_max + 1) + trailing)


def synthesize(coefs, tables: BasisTables) -> np.ndarray:
    """Transverse field ``sum c_{n,k} phi_{n,k}`` on the ``(N, N)`` grid."""
    s = tables.spec
    coefs = np.asarray(coefs)
    if coefs.shape[:2] != (s.n_max + 1, s.k_max + 1):
        raise ValueError(f"coefficient shape {coefs.shape} does not match truncation")
    trailing = coefs.shape[2:]
    u = tables.values.T @ coefs.reshape(s.n_modes, -1)
    return u.reshape(tables.shape2d + trailing)


def project_level(field, n: int):
    """Orthogonal projector onto Landau level ``n`` within the truncation.

    Accepts a :class:`~landau_nls.field.Field` or a raw coefficient array whose
    leading axis is the level index.
    """
    coefs = field.coefs if hasattr(field, "coefs") else np.asarray(field)
    n_levels = coefs.shape[0]
    if not 0 <= n < n_levels:
        raise ValueError(f"level {n} outside truncation 0..{n_levels - 1}")
    out = np.zeros_like(coefs)
    out[n] = coefs[n]
    return field.with_coefs(out) if hasattr(field, "coefs") else out


def lll_kernel_project(u, tables: BasisTables, threads: int = 1) -> np.ndarray:
    """Lowest-Landau-level projector applied through its integral kernel.

    ``(P0 u)(w) = (2 pi)^-1 exp(-|w|^2/4) sum_v exp(conj(w) v / 2 - |v|^2/4) u(v) dx^2``
    with the sum running over the transverse grid.  Complements the basis
    projector ``synthesize(project_level(analyze(u), 0))`` and shares no code
    with it.
    """
    flat = _check_slice(u, tables)
    if flat.ndim != 1:
        raise ValueError("lll_kernel_project acts on a single transverse slice")
    out = kernels.lll_kernel_apply(
        np.ascontiguousarray(tables.x1), np.ascontiguousarray(tables.x2),
        np.ascontiguousarray(flat, dtype=complex), tables.weight, threads)
    return out.reshape(tables.shape2d)


def eigen_residual(tables: BasisTables, n: int, k: int) -> float:
    """L2 norm of ``(H - (n + 1/2)) phi_{n,k}`` with FFT derivatives."""
    s = tables.spec
    phi = tables.mode(n, k)
    npts = s.grid_points_per_axis
    kk = 2.0 * np.pi * np.fft.fftfreq(npts, d=s.dx)
    k1 = kk[:, None]
    k2 = kk[None, :]
    ph = np.fft.fft2(phi)
    lap = np.fft.ifft2(-(k1 ** 2 + k2 ** 2) * ph)
    d1 = np.fft.ifft2(1j * k1 * ph)
    d2 = np.fft.ifft2(1j * k2 * ph)
    x1 = tables.x1.reshape(npts, npts)
    x2 = tables.x2.reshape(npts, npts)
    h_phi = -0.5 * lap + 0.125 * (x1 ** 2 + x2 ** 2) * phi - 0.5j * (-x2 * d1 + x1 * d2)
    res = h_phi - eigenvalue(n) * phi
    return float(np.sqrt(np.sum(np.abs(res) ** 2) * tables.weight))
