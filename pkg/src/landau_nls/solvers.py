"""Time integrators for the confined equation and its averaged limit.

Full model (filtered by nothing):

    i d_t psi = eps^-2 H psi + H_z psi + lam Pi(|psi|^(2 sigma) psi)

Averaged model:

    i d_t phi = H_z phi + lam F_av(phi)

``Pi`` is the Galerkin projection onto the kept Landau modes.  Both schemes
are Strang splittings with the linear flow integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import BasisTables
from .field import Field, SimParams, energy, l2_error, mass, sigma2_prime_norm
from .nonlinearity import (ThetaQuadrature, f_av_coefs, projected_phase,
                           projected_power, spectral_leakage)
from .propagators import LinearStepPlan, landau_phase

__all__ = [
    "AveragedStepper",
    "FullStepper",
    "LLLStepper",
    "NumericalAbort",
    "ReducedLevelStepper",
    "Trajectory",
    "evolve",
    "filtered_error",
    "full_dt",
    "step_averaged",
    "step_full",
]


class NumericalAbort(FloatingPointError):
    """A step produced non-finite values."""

    def __init__(self, time: float, what: str = "state"):
        super().__init__(f"non-finite {what} at t={time:.6g}")
        self.time = time


def full_dt(eps: float, dt_base: float) -> float:
    """Step for the full solver: ``min(dt_base, eps^2 / 10)``."""
    return min(dt_base, eps * eps / 10.0)


def _rk4(rhs: Callable[[np.ndarray], np.ndarray], c: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(c)
    k2 = rhs(c + 0.5 * h * k1)
    k3 = rhs(c + 0.5 * h * k2)
    k4 = rhs(c + h * k3)
    return c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _Stepper:
    """Shared plumbing: plan cache keyed by step size, Field wrapper."""

    kind = "base"

    def __init__(self, params: SimParams, grid, tables: BasisTables):
        self.params = params
        self.grid = grid
        self.tables = tables
        self.n_levels = tables.spec.n_max + 1
        self._plans: dict[float, LinearStepPlan] = {}

    def _plan(self, tau: float, eps: float | None = None) -> LinearStepPlan:
        key = (tau, eps)
        plan = self._plans.get(key)
        if plan is None:
            plan = LinearStepPlan(self.grid, self.n_levels, tau, self.params.potential, eps)
            if len(self._plans) > 8:
                self._plans.clear()
            self._plans[key] = plan
        return plan

    def advance(self, c: np.ndarray, dt: float) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, f: Field, dt: float) -> Field:
        if not dt > 0:
            raise ValueError("dt must be positive")
        return f.with_coefs(self.advance(f.coefs, dt))


class FullStepper(_Stepper):
    """Strang step for the confined equation.

    half linear -- nonlinear over dt -- half linear.  ``nonlinear="rk4"``
    integrates ``i c' = lam Pi(|u|^(2 sigma) u)`` with one classical RK4 step;
    ``nonlinear="phase"`` uses the exact pointwise phase flow followed by the
    Galerkin projection.
    """

    kind = "full"

    def __init__(self, params: SimParams, grid, tables: BasisTables, nonlinear: str = "rk4"):
        super().__init__(params, grid, tables)
        if nonlinear not in ("rk4", "phase"):
            raise ValueError("nonlinear substep must be 'rk4' or 'phase'")
        self.nonlinear = nonlinear

    def _rhs(self, c):
        return -1j * self.params.lam * projected_power(c, self.tables, self.params.sigma)

    def advance(self, c, dt):
        p = self.params
        if p.lam == 0.0:
            return self._plan(dt, p.eps).full(c)
        half = self._plan(0.5 * dt, p.eps)
        c = half.full(c)
        if self.nonlinear == "rk4":
            c = _rk4(self._rhs, c, dt)
        else:
            c = projected_phase(c, self.tables, dt * p.lam, p.sigma)
        return half.full(c)


class AveragedStepper(_Stepper):
    """half H_z -- RK4 on ``i c' = lam F_av(c)`` -- half H_z."""

    kind = "averaged"

    def __init__(self, params: SimParams, grid, tables: BasisTables):
        super().__init__(params, grid, tables)
        self.quad = ThetaQuadrature(params.nodes_for(self.n_levels - 1))

    def _rhs(self, c):
        return -1j * self.params.lam * f_av_coefs(c, self.tables, self.params.sigma, self.quad)

    def advance(self, c, dt):
        if self.params.lam == 0.0:
            return self._plan(dt).hz(c)
        half = self._plan(0.5 * dt)
        c = _rk4(self._rhs, half.hz(c), dt)
        return half.hz(c)


class ReducedLevelStepper(AveragedStepper):
    """Same scheme with the nonlinearity ``lam P_n Pi(|u|^(2 sigma) u)``."""

    kind = "reduced"

    def __init__(self, params: SimParams, grid, tables: BasisTables, level: int):
        super().__init__(params, grid, tables)
        if not 0 <= level < self.n_levels:
            raise ValueError("level outside truncation")
        self.level = level

    def _rhs(self, c):
        out = np.zeros_like(c)
        out[self.level] = projected_power(c, self.tables, self.params.sigma)[self.level]
        return -1j * self.params.lam * out


class LLLStepper(ReducedLevelStepper):
    """Direct lowest-Landau-level flow ``i c' = lam P_0 Pi(|u|^2 u)`` (2D, RK4)."""

    kind = "lll"

    def __init__(self, params: SimParams, grid, tables: BasisTables):
        if params.sigma != 1:
            raise ValueError("the LLL equation has sigma == 1")
        super().__init__(params, grid, tables, level=0)

    def advance(self, c, dt):
        return _rk4(self._rhs, c, dt)


def step_full(f: Field, dt: float, params: SimParams, nonlinear: str = "rk4") -> Field:
    return FullStepper(params, f.grid, f.basis, nonlinear)(f, dt)


def step_averaged(f: Field, dt: float, params: SimParams) -> Field:
    return AveragedStepper(params, f.grid, f.basis)(f, dt)


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    steps: int = 0

    def column(self, name: str) -> np.ndarray:
        return np.array([d[name] for d in self.diagnostics])

    @property
    def final(self) -> Field:
        return self.states[-1]


def diagnostics(f: Field, params: SimParams, with_energy: bool = True) -> dict:
    out = {
        "mass": mass(f),
        "sigma2prime": sigma2_prime_norm(f),
        "level_masses": f.level_masses().tolist(),
        "leakage": spectral_leakage(f.coefs, f.basis, params.sigma, f.grid.dz),
    }
    out["energy"] = energy(f, params) if with_energy else float("nan")
    return out


def evolve(f: Field, T: float, dt: float, stepper, schedule: Sequence[float] | None = None,
           params: SimParams | None = None, with_energy: bool = True) -> Trajectory:
    """Advance ``f`` to time ``T`` recording the state at each schedule time.

    Steps of size ``dt`` are taken; a step is shortened when it would pass the
    next sample time, so every sample (and ``T``) is hit exactly.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if schedule is None:
        schedule = [0.0, T]
    sched = sorted(set(float(t) for t in schedule))
    if sched and (sched[0] < 0 or sched[-1] > T + 1e-12 * max(T, 1.0)):
        raise ValueError("schedule must lie in [0, T]")
    if T == 0:
        sched = [0.0]
    if params is None:
        params = getattr(stepper, "params", None)
    advance = stepper.advance if hasattr(stepper, "advance") else (
        lambda c, h: stepper(f.with_coefs(c), h).coefs)

    traj = Trajectory()
    c = f.coefs
    t = 0.0
    nsteps = 0
    for target in sched:
        # fixed dt, with the remainder as a final partial step
        n_full = int(math.floor((target - t) / dt + 1e-9))
        for i in range(n_full):
            c = advance(c, dt)
            nsteps += 1
            if not np.isfinite(c).all():
                raise NumericalAbort(t + (i + 1) * dt)
        rest = target - (t + n_full * dt)
        if rest > 1e-12 * dt:
            c = advance(c, rest)
            nsteps += 1
            if not np.isfinite(c).all():
                raise NumericalAbort(target)
        t = target
        state = f.with_coefs(c)
        traj.times.append(target)
        traj.states.append(state)
        if params is not None:
            traj.diagnostics.append(diagnostics(state, params, with_energy))
        else:
            traj.diagnostics.append({"mass": mass(state)})
    traj.steps = nsteps
    return traj


def filtered_error(full_traj: Trajectory, avg_traj: Trajectory, eps: float) -> float:
    """``max_t || psi(t) - exp(-i t H / eps^2) phi(t) ||``."""
    if len(full_traj.times) != len(avg_traj.times) or not np.allclose(
            full_traj.times, avg_traj.times, rtol=0, atol=1e-12):
        raise ValueError("trajectories are sampled on different schedules")
    worst = 0.0
    for t, psi, phi in zip(full_traj.times, full_traj.states, avg_traj.states):
        theta = math.fmod(t / eps ** 2, 4.0 * math.pi)
        worst = max(worst, l2_error(psi, landau_phase(phi, theta)))
    return worst
