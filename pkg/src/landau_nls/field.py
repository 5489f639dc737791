"""State representation: Landau coefficients times a periodic z grid."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import BasisTables, level_phase_factors, synthesize

__all__ = [
    "Field",
    "Grid",
    "Potential",
    "QuadratureWarning",
    "SimParams",
    "default_theta_nodes",
    "energy",
    "gaussian_profile",
    "l2_error",
    "make_initial",
    "mass",
    "sigma2_prime_norm",
]


class QuadratureWarning(UserWarning):
    """Theta quadrature has fewer nodes than the exactness rule requires."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic z grid on ``[-L_z, L_z)``.

    ``z_points == 1`` selects the two-dimensional mode: a single node at
    ``z = 0`` with unit weight and no z dynamics.
    """

    z_points: int = 128
    z_half_width: float = 10.0

    def __post_init__(self):
        nz = self.z_points
        if nz < 1 or nz & (nz - 1):
            raise ValueError(f"z_points must be a power of two, got {nz}")
        if not self.z_half_width > 0:
            raise ValueError("z_half_width must be positive")

    @property
    def is_2d(self) -> bool:
        return self.z_points == 1

    @property
    def dz(self) -> float:
        if self.is_2d:
            return 1.0
        return 2.0 * self.z_half_width / self.z_points

    @property
    def z(self) -> np.ndarray:
        if self.is_2d:
            return np.zeros(1)
        return -self.z_half_width + self.dz * np.arange(self.z_points)

    @property
    def z_wavenumbers(self) -> np.ndarray:
        if self.is_2d:
            return np.zeros(1)
        return 2.0 * np.pi * np.fft.fftfreq(self.z_points, d=self.dz)

    def to_dict(self) -> dict:
        return {"z_points": self.z_points, "z_half_width": self.z_half_width}


@dataclass(frozen=True)
class Potential:
    """Sub-quadratic confining potential along z.

    kinds: ``harmonic`` (omega) -> omega^2 z^2 / 2; ``cosine`` (a, b) ->
    a cos(b z); ``polynomial2`` (c0, c1, c2) -> c0 + c1 z + c2 z^2;
    ``zero``.
    """

    kind: str = "zero"
    params: tuple = ()

    _ARITY = {"zero": 0, "harmonic": 1, "cosine": 2, "polynomial2": 3}

    def __post_init__(self):
        if self.kind not in self._ARITY:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.params) != self._ARITY[self.kind]:
            raise ValueError(
                f"{self.kind} potential takes {self._ARITY[self.kind]} parameters")

    @classmethod
    def harmonic(cls, omega: float = 1.0) -> Potential:
        return cls("harmonic", (omega,))

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        p = self.params
        if self.kind == "harmonic":
            return 0.5 * p[0] ** 2 * z * z
        if self.kind == "cosine":
            return p[0] * np.cos(p[1] * z)
        if self.kind == "polynomial2":
            return p[0] + p[1] * z + p[2] * z * z
        return np.zeros_like(z)

    def samples(self, grid: Grid) -> np.ndarray:
        return self(grid.z)

    @property
    def is_zero(self) -> bool:
        if self.kind == "cosine":
            return self.params[0] == 0.0
        return not any(self.params)

    def second_derivative_bound(self, grid: Grid) -> float:
        """Largest |V''| seen by centered differences on the grid samples."""
        if grid.z_points < 3:
            return 0.0
        v = self.samples(grid)
        d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / grid.dz ** 2
        return float(np.max(np.abs(d2)))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


def default_theta_nodes(sigma: int, n_max: int) -> int:
    return 2 * (sigma + 1) * (n_max + 1)


@dataclass(frozen=True)
class SimParams:
    eps: float = 0.1
    lam: float = 0.5
    sigma: int = 1
    potential: Potential = field(default_factory=Potential)
    theta_nodes: int | None = None
    dt: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise ValueError("eps must lie in (0, 1]")
        if int(self.sigma) != self.sigma or self.sigma < 1:
            raise ValueError("sigma must be a positive integer")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.theta_nodes is not None and self.theta_nodes < 1:
            raise ValueError("theta_nodes must be positive")

    def nodes_for(self, n_max: int) -> int:
        if self.theta_nodes is None:
            return default_theta_nodes(self.sigma, n_max)
        return self.theta_nodes

    @property
    def beta(self) -> float:
        """Unscaled coupling ``lambda eps^(2 sigma)``."""
        return self.lam * self.eps ** (2 * self.sigma)

    def to_dict(self) -> dict:
        return {"eps": self.eps, "lam": self.lam, "sigma": self.sigma,
                "potential": self.potential.to_dict(),
                "theta_nodes": self.theta_nodes, "dt": self.dt}


@dataclass(frozen=True, eq=False)
class Field:
    """Coefficients ``c[n, k, j]`` of ``sum phi_{n,k}(x) c[n, k](z_j)``."""

    coefs: np.ndarray
    grid: Grid
    basis: BasisTables = field(repr=False)

    def __post_init__(self):
        s = self.basis.spec
        shape = (s.n_max + 1, s.k_max + 1, self.grid.z_points)
        c = np.asarray(self.coefs, dtype=complex)
        if c.shape != shape:
            raise ValueError(f"coefficient shape {c.shape} != expected {shape}")
        if not np.all(np.isfinite(c)):
            raise FloatingPointError("field contains non-finite coefficients")
        object.__setattr__(self, "coefs", c)

    @classmethod
    def zeros(cls, grid: Grid, basis: BasisTables) -> Field:
        s = basis.spec
        return cls(np.zeros((s.n_max + 1, s.k_max + 1, grid.z_points), complex), grid, basis)

    def with_coefs(self, coefs) -> Field:
        return Field(coefs, self.grid, self.basis)

    def compatible(self, other: Field) -> bool:
        return self.grid == other.grid and (
            self.basis is other.basis or self.basis.spec == other.basis.spec)

    def _check(self, other: Field):
        if not self.compatible(other):
            raise ValueError("fields live on different discretizations")

    def __add__(self, other: Field) -> Field:
        self._check(other)
        return self.with_coefs(self.coefs + other.coefs)

    def __sub__(self, other: Field) -> Field:
        self._check(other)
        return self.with_coefs(self.coefs - other.coefs)

    def __mul__(self, alpha) -> Field:
        return self.with_coefs(complex(alpha) * self.coefs)

    __rmul__ = __mul__

    def __neg__(self) -> Field:
        return self.with_coefs(-self.coefs)

    def physical(self) -> np.ndarray:
        """Values on the ``(N, N, z_points)`` grid."""
        return synthesize(self.coefs, self.basis)

    def level_masses(self) -> np.ndarray:
        return np.sum(np.abs(self.coefs) ** 2, axis=(1, 2)) * self.grid.dz


def mass(field: Field) -> float:
    """Squared L2 norm ``sum |c|^2 dz``."""
    c = field.coefs
    return float(np.sum(c.real ** 2 + c.imag ** 2) * field.grid.dz)


def l2_error(a: Field, b: Field) -> float:
    return math.sqrt(mass(a - b))


def _dzz(coefs: np.ndarray, grid: Grid) -> np.ndarray:
    if grid.is_2d:
        return np.zeros_like(coefs)
    kz = grid.z_wavenumbers
    return np.fft.ifft(-(kz ** 2) * np.fft.fft(coefs, axis=-1), axis=-1)


def sigma2_prime_norm(field: Field) -> float:
    """Harmonic-oscillator weighted norm.

    ``sqrt(|f|^2 + |H0 f|^2 + |d_z^2 f|^2 + |z^2 f|^2)`` with ``H0`` diagonal
    as ``n + k + 1`` on the Landau modes.
    """
    s = field.basis.spec
    c = field.coefs
    grid = field.grid
    h0 = (np.arange(s.n_max + 1)[:, None] + np.arange(s.k_max + 1)[None, :] + 1.0)
    terms = (
        np.abs(c) ** 2,
        (h0[:, :, None] * np.abs(c)) ** 2,
        np.abs(_dzz(c, grid)) ** 2,
        (grid.z ** 2 * np.abs(c)) ** 2,
    )
    return math.sqrt(sum(float(np.sum(t)) for t in terms) * grid.dz)


def _theta_rule_check(J: int, sigma: int, n_max: int) -> bool:
    ok = J >= default_theta_nodes(sigma, n_max)
    if not ok:
        warnings.warn(
            f"{J} theta nodes is below the exactness rule "
            f"{default_theta_nodes(sigma, n_max)}", QuadratureWarning, stacklevel=3)
    return ok


def energy(field: Field, params: SimParams) -> float:
    """Energy of the averaged model.

    ``1/2 |d_z f|^2 + <V f, f> + lambda/(sigma+1) * mean_theta int |e^{-i theta H} f|^(2 sigma + 2)``
    with the theta mean taken over ``J`` equispaced nodes.
    """
    grid = field.grid
    tables = field.basis
    c = field.coefs
    dz = grid.dz
    if grid.is_2d:
        kinetic = 0.0
    else:
        chat = np.fft.fft(c, axis=-1)
        kz = grid.z_wavenumbers
        # Parseval: sum |c|^2 dz = sum |chat|^2 dz / Nz
        kinetic = 0.5 * float(np.sum(kz ** 2 * np.abs(chat) ** 2)) * dz / grid.z_points
    pot = float(np.sum(params.potential.samples(grid) * np.abs(c) ** 2)) * dz
    if params.lam == 0.0:
        return kinetic + pot
    n_levels = c.shape[0]
    J = params.nodes_for(n_levels - 1)
    _theta_rule_check(J, params.sigma, n_levels - 1)
    acc = 0.0
    p = params.sigma + 1
    for j in range(J):
        ph = level_phase_factors(n_levels, 2.0 * math.pi * j / J)
        u = synthesize(ph[:, None, None] * c, tables)
        a2 = u.real ** 2 + u.imag ** 2
        acc += float(np.sum(a2 ** p))
    inter = params.lam / p * acc / J * tables.weight * dz
    return kinetic + pot + inter


def gaussian_profile(z, center: float = 0.0, width: float = 1.0, momentum: float = 0.0):
    """``exp(-(z - center)^2 / (2 width^2) + i momentum z)``, unnormalized."""
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * ((z - center) / width) ** 2 + 1j * momentum * z)


def _profile(profile, grid: Grid) -> np.ndarray:
    if profile is None:
        return gaussian_profile(grid.z).astype(complex)
    if callable(profile):
        return np.asarray(profile(grid.z), dtype=complex)
    h = np.asarray(profile, dtype=complex)
    if h.shape != (grid.z_points,):
        raise ValueError("z profile does not match the grid")
    return h


def make_initial(kind: str, grid: Grid, basis: BasisTables, *,
                 n: int | None = None, k: int | None = None,
                 coefficients: Sequence | np.ndarray | None = None,
                 profile: Callable | np.ndarray | None = None) -> Field:
    """Unit-mass initial data.

    kinds:
      ``single_mode``: ``phi_{n,k} (x) h(z)``;
      ``level_packet``: ``sum_k a_k phi_{n,k} (x) h(z)`` with ``coefficients = a``;
      ``multi_level_packet``: ``sum_{n,k} a_{n,k} phi_{n,k} (x) h(z)`` with
      ``coefficients`` a 2D array ``a[n][k]`` (missing entries are zero).

    ``profile`` is a callable of z, an array on the grid, or None for the
    Gaussian ``exp(-z^2/2)``.
    """
    s = basis.spec
    shape = (s.n_max + 1, s.k_max + 1)
    amp = np.zeros(shape, dtype=complex)
    if kind == "single_mode":
        if n is None or k is None:
            raise ValueError("single_mode needs n and k")
        amp[_level(n, s.n_max), _degen(k, s.k_max)] = 1.0
    elif kind == "level_packet":
        if n is None or coefficients is None:
            raise ValueError("level_packet needs n and coefficients")
        a = np.asarray(coefficients, dtype=complex).ravel()
        if a.size > s.k_max + 1:
            raise ValueError("more degeneracy coefficients than k_max + 1")
        amp[_level(n, s.n_max), :a.size] = a
    elif kind == "multi_level_packet":
        if coefficients is None:
            raise ValueError("multi_level_packet needs coefficients")
        rows = [np.atleast_1d(np.asarray(r, dtype=complex)) for r in coefficients]
        if len(rows) > shape[0] or any(r.size > shape[1] for r in rows):
            raise ValueError("coefficient block exceeds the truncation")
        for lvl, r in enumerate(rows):
            amp[lvl, :r.size] = r
    else:
        raise ValueError(f"unknown initial-data kind {kind!r}")
    if not np.any(amp):
        raise ValueError("initial coefficients are all zero")
    h = _profile(profile, grid)
    coefs = amp[:, :, None] * h[None, None, :]
    f = Field(coefs, grid, basis)
    m = mass(f)
    if m == 0.0:
        raise ValueError("initial data has zero mass on this grid")
    return f.with_coefs(coefs / math.sqrt(m))


def _level(n, n_max):
    if not 0 <= n <= n_max:
        raise ValueError(f"level {n} outside 0..{n_max}")
    return n


def _degen(k, k_max):
    if not 0 <= k <= k_max:
        raise ValueError(f"degeneracy index {k} outside 0..{k_max}")
    return k
