"""Grid, parameters, fluid state and initial data for the 1D laboratory."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from .profiles import InitialProfile


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 8:
            raise ValueError(f"n_cells must be >= 8, got {self.n_cells}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


def default_kappa(gamma: float) -> float:
    return min(1.0, 2.0 / gamma, 2.0 * gamma - 1.0)


@dataclass(frozen=True)
class Params:
    """Physical and numerical parameters.

    ``epsilon = 0`` selects the pressureless limit system. ``kappa`` defaults
    to ``min(1, 2/gamma, 2*gamma - 1)``.
    """

    epsilon: float = 0.0
    gamma: float = 1.5
    kappa: Optional[float] = None
    vac_threshold: float = 1e-12
    cfl: float = 0.4

    def __post_init__(self):
        if self.kappa is None:
            object.__setattr__(self, "kappa", default_kappa(self.gamma))
        if not 1.0 < self.gamma <= 1.5:
            raise ValueError(f"gamma must lie in (1, 3/2], got {self.gamma}")
        kmax = min(2.0 * self.gamma - 1.0, 2.0 / self.gamma)
        if not 0.0 < self.kappa <= kmax + 1e-15:
            raise ValueError(f"kappa must lie in (0, {kmax}], got {self.kappa}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if not self.vac_threshold > 0:
            raise ValueError("vac_threshold must be > 0")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")

    @property
    def bd_coefficient(self) -> float:
        """Factor eps*gamma/(gamma-1) in front of d/dx rho^(gamma-1)."""
        return self.epsilon * self.gamma / (self.gamma - 1.0)


@dataclass(frozen=True)
class FluidState:
    t: float
    rho: np.ndarray
    mom: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen(self.rho))
        object.__setattr__(self, "mom", _frozen(self.mom))
        if self.rho.shape != self.mom.shape:
            raise ValueError("rho and mom must have the same shape")


@dataclass(frozen=True)
class Moments:
    m0: float
    m1: float
    xm: float
    x2m: float
    xkm: float
    ukm: float


def derive_velocity_field(rho, mom, vac_threshold: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    mom = np.asarray(mom, dtype=float)
    u = np.zeros_like(rho)
    live = rho >= vac_threshold
    u[live] = mom[live] / rho[live]
    return u


def derive_velocity(state: FluidState, p: Params) -> np.ndarray:
    return derive_velocity_field(state.rho, state.mom, p.vac_threshold)


def artificial_velocity_field(rho, u, dx: float, p: Params) -> np.ndarray:
    """v = u + eps*gamma/(gamma-1) * D_x rho^(gamma-1), with v = u on vacuum cells.

    D_x is the central difference, one-sided at the two ends.
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if p.epsilon == 0.0:
        return u.copy()
    grad = np.gradient(np.maximum(rho, 0.0) ** (p.gamma - 1.0), dx)
    v = u + p.bd_coefficient * grad
    vac = rho < p.vac_threshold
    v[vac] = u[vac]
    return v


def artificial_velocity(state: FluidState, p: Params, g: Grid) -> np.ndarray:
    return artificial_velocity_field(state.rho, derive_velocity(state, p), g.dx, p)


class InitialDataError(ValueError):
    """Raised when initial data violate the admissibility hypotheses."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid initial data: " + "; ".join(self.violations))


@dataclass(frozen=True)
class InitialData:
    """Cell samples of the initial density and velocity.

    ``profile`` keeps the analytic family the samples came from, when there
    is one; the exact Euler solver and the threshold classifier read point
    values and derivatives from it.
    """

    rho0: np.ndarray
    u0: np.ndarray
    M0: float = float("nan")
    M1: float = float("nan")
    xbar0: float = float("nan")
    profile: Optional["InitialProfile"] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rho0", _frozen(self.rho0))
        object.__setattr__(self, "u0", _frozen(self.u0))

    @classmethod
    def from_profile(
        cls,
        profile: "InitialProfile",
        g: Grid,
        p: Optional[Params] = None,
        prescribe: str = "u",
    ) -> "InitialData":
        """Sample a profile on ``g``: cell averages of density, point values of velocity.

        With ``prescribe="v"`` the profile velocity is taken as the artificial
        velocity, so ``u0 = w0 - eps*gamma/(gamma-1) D_x rho0^(gamma-1)``.
        """
        cdf = profile.cdf(g.faces)
        rho0 = np.maximum(np.diff(cdf) / g.dx, 0.0)
        u0 = profile.u(g.centers)
        if prescribe == "v":
            if p is None:
                raise ValueError("prescribe='v' needs Params")
            v0 = u0
            u0 = 2.0 * v0 - artificial_velocity_field(rho0, v0, g.dx, p)
        elif prescribe != "u":
            raise ValueError(f"prescribe must be 'u' or 'v', got {prescribe!r}")
        u0 = np.where(rho0 >= (p.vac_threshold if p else 0.0), u0, 0.0)
        return cls(rho0=rho0, u0=u0, profile=profile)

    def state(self) -> FluidState:
        return FluidState(0.0, self.rho0, self.rho0 * self.u0)


def initial_data_violations(d: InitialData, p: Params, g: Grid) -> list[str]:
    """Every admissibility hypothesis violated by ``d`` on ``g``."""
    out: list[str] = []
    rho0, u0 = np.asarray(d.rho0), np.asarray(d.u0)
    if rho0.shape != (g.n_cells,) or u0.shape != (g.n_cells,):
        return [f"arrays must have length n_cells={g.n_cells}"]
    if not (np.all(np.isfinite(rho0)) and np.all(np.isfinite(u0))):
        out.append("rho0, u0 finite")
    if np.any(rho0 < 0):
        out.append("rho0 >= 0")
    M0 = float(np.sum(rho0) * g.dx)
    if not (M0 > 0 and np.isfinite(M0)):
        out.append("M0 > 0")
    x = g.centers
    xk = np.abs(x) ** (p.kappa + 2.0) * np.maximum(rho0, 0.0)
    total = float(np.sum(xk))
    if not np.isfinite(total):
        out.append("|x|^(kappa+2) rho0 in L1")
    elif total > 0:
        n_tail = max(1, int(round(0.05 * g.n_cells)))
        tail = float(np.sum(xk[:n_tail]) + np.sum(xk[-n_tail:]))
        if tail > 0.01 * total:
            out.append("|x|^(kappa+2) rho0 in L1 (tail mass on outer 10% of cells)")
    if not np.isfinite(np.sum(rho0 * np.abs(u0) ** (2.0 + p.kappa))):
        out.append("rho0 |u0|^(2+kappa) in L1")
    return out


def validate_initial_data(d: InitialData, p: Params, g: Grid) -> InitialData:
    """Check admissibility and fill in M0, M1, xbar0; raise InitialDataError otherwise."""
    violations = initial_data_violations(d, p, g)
    if violations:
        raise InitialDataError(violations)
    dx = g.dx
    return InitialData(
        rho0=d.rho0,
        u0=d.u0,
        M0=float(np.sum(d.rho0) * dx),
        M1=float(np.sum(d.rho0 * d.u0) * dx),
        xbar0=float(np.sum(g.centers * d.rho0) * dx),
        profile=d.profile,
    )
