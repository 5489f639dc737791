"""Linear flows: Landau phase rotation, z kinetic/potential steps and their
Strang compositions.

Every flow is diagonal either in the Landau level index or in the z
wavenumber, so the public functions are thin wrappers around a
:class:`LinearStepPlan` that caches the multipliers for a fixed step.
"""

from __future__ import annotations

import math

import numpy as np

from .basis import level_phase_factors
from .field import Field, Grid, Potential

__all__ = [
    "LinearStepPlan",
    "hz_step",
    "kinetic_z_step",
    "landau_phase",
    "linear_step_full",
    "potential_z_step",
]

_FOUR_PI = 4.0 * math.pi


def _zfft(c, grid):
    return c if grid.is_2d else np.fft.fft(c, axis=-1)


def _zifft(c, grid):
    return c if grid.is_2d else np.fft.ifft(c, axis=-1)


class LinearStepPlan:
    """Precomputed multipliers for steps of size ``tau``.

    ``full`` applies ``exp(-i tau (eps^-2 H + H_z))`` (Strang in V) and
    ``hz`` applies ``exp(-i tau H_z)`` (Strang in V); both act on raw
    coefficient arrays of shape ``(levels, k, z)``.
    """

    def __init__(self, grid: Grid, n_levels: int, tau: float,
                 potential: Potential | None = None, eps: float | None = None):
        self.grid = grid
        self.tau = float(tau)
        self.eps = eps
        potential = potential or Potential()
        self.has_potential = not potential.is_zero
        kz = grid.z_wavenumbers
        self.kinetic = np.exp(-0.5j * self.tau * kz ** 2)
        self.half_potential = np.exp(-0.5j * self.tau * potential.samples(grid))
        if eps is not None:
            if not eps > 0:
                raise ValueError("eps must be positive")
            # reduce tau/eps^2 mod 4 pi before forming phases
            theta = math.fmod(self.tau / eps ** 2, _FOUR_PI)
            self.landau = level_phase_factors(n_levels, theta)
            self.core = self.landau[:, None, None] * self.kinetic[None, None, :]
        else:
            self.landau = None
            self.core = None

    def _potential_half(self, c):
        if self.has_potential:
            return c * self.half_potential
        return c

    def hz(self, c: np.ndarray) -> np.ndarray:
        c = self._potential_half(c)
        c = _zifft(_zfft(c, self.grid) * self.kinetic, self.grid)
        return self._potential_half(c)

    def full(self, c: np.ndarray) -> np.ndarray:
        if self.core is None:
            raise ValueError("plan was built without eps")
        c = self._potential_half(c)
        c = _zifft(_zfft(c, self.grid) * self.core, self.grid)
        return self._potential_half(c)


def landau_phase(field: Field, theta: float) -> Field:
    """``exp(-i theta H)`` applied level by level."""
    ph = level_phase_factors(field.coefs.shape[0], theta)
    return field.with_coefs(ph[:, None, None] * field.coefs)


def kinetic_z_step(field: Field, tau: float) -> Field:
    """``exp(i tau d_z^2 / 2)`` as a Fourier multiplier."""
    grid = field.grid
    mult = np.exp(-0.5j * tau * grid.z_wavenumbers ** 2)
    return field.with_coefs(_zifft(_zfft(field.coefs, grid) * mult, grid))


def potential_z_step(field: Field, tau: float, potential: Potential) -> Field:
    """Pointwise ``exp(-i tau V(z))``, identical on every Landau mode."""
    mult = np.exp(-1j * tau * potential.samples(field.grid))
    return field.with_coefs(field.coefs * mult)


def linear_step_full(field: Field, tau: float, eps: float,
                     potential: Potential | None = None) -> Field:
    """Linear part of the confined equation over ``tau``.

    Landau rotation and z kinetic flow are applied exactly in the joint
    (level, wavenumber) diagonal; V enters by Strang halves around them.
    """
    plan = LinearStepPlan(field.grid, field.coefs.shape[0], tau, potential, eps)
    return field.with_coefs(plan.full(field.coefs))


def hz_step(field: Field, tau: float, potential: Potential | None = None) -> Field:
    """Strang step for ``H_z = -1/2 d_z^2 + V(z)``."""
    plan = LinearStepPlan(field.grid, field.coefs.shape[0], tau, potential)
    return field.with_coefs(plan.hz(field.coefs))
