"""Numerical laboratory for the vanishing-viscosity limit of 1D degenerate
Navier-Stokes with drag and attractive-repulsive interaction, towards the
pressureless Euler system and its explicit Lagrangian solution."""
from .euler_exact import EulerSolution, euler_state_at, solve_ode
from .model import FluidState, Grid, InitialData, InitialDataError, Params, validate_initial_data
from .ns_solver import SchemeConfig, SolverAbort, Trajectory, simulate, step
from .profiles import InitialProfile
from .thresholds import classify, crossing_scan

__all__ = [
    "EulerSolution",
    "FluidState",
    "Grid",
    "InitialData",
    "InitialDataError",
    "InitialProfile",
    "Params",
    "SchemeConfig",
    "SolverAbort",
    "Trajectory",
    "classify",
    "crossing_scan",
    "euler_state_at",
    "simulate",
    "solve_ode",
    "step",
    "validate_initial_data",
]
__version__ = "0.1.0"
