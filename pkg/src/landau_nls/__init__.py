"""Spectral simulation of the NLS equation under strong magnetic confinement
and of its averaged (Landau-level resonant) limit."""

from .basis import (BasisSpec, BasisTables, analyze, build_basis, eigen_residual,
                    lll_kernel_project, mode_function, project_level, synthesize)
from .field import (Field, Grid, Potential, QuadratureWarning, SimParams, energy,
                    l2_error, make_initial, mass, sigma2_prime_norm)
from .kernels import BACKEND
from .nonlinearity import (F_av_quadrature, F_av_resonant_oracle, F_theta,
                           nonlinear_phase_step, pointwise_power)
from .propagators import hz_step, kinetic_z_step, landau_phase, linear_step_full, potential_z_step
from .solvers import (AveragedStepper, FullStepper, LLLStepper, NumericalAbort, Trajectory,
                      evolve, filtered_error, step_averaged, step_full)

__version__ = "0.1.0"
