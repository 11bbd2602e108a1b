"""Closed-form strong solution of the pressureless Euler limit.

Along characteristics the Lagrangian velocity w(t, x) = u(t, eta(t, x)) obeys
the damped oscillator

    w'' + w' + M0 w = M1 exp(-t),   w(0) = u0(x),   w'(0) = w0'(x),

whose solution is written as ``w = P(x) f1(t) + Q(x) f2(t) + (M1/M0) exp(-t)``
with two homogeneous modes (f1, f2) fixed by the sign of 1 - 4 M0. Time
integrals of the modes are taken in closed form, never by quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import Grid, InitialData
from .profiles import InitialProfile

TOL_CASE = 1e-12
TOL_INV = 1e-12
N_PROBES = 64


class DomainError(ValueError):
    """Requested position lies outside the image of the support."""


class NonMonotoneError(RuntimeError):
    """d eta/dx lost positivity: characteristics have crossed."""


@dataclass(frozen=True)
class CaseRegime:
    tag: str
    xi: float
    sq: Optional[float] = None
    lambda1: Optional[float] = None
    lambda2: Optional[float] = None

    @property
    def omega(self) -> Optional[float]:
        return None if self.sq is None else 0.5 * np.sqrt(self.sq)


def classify_regime(M0: float, tol_case: float = TOL_CASE) -> CaseRegime:
    """Case A (1 - 4 M0 > 0), B (= 0 within tol_case) or C (< 0)."""
    if not M0 > 0:
        raise ValueError(f"total mass must be positive, got {M0}")
    xi = 1.0 - 4.0 * M0
    if abs(xi) <= tol_case:
        return CaseRegime("B", xi)
    if xi > 0:
        root = np.sqrt(xi)
        return CaseRegime("A", xi, lambda1=0.5 * (-1 + root), lambda2=0.5 * (-1 - root))
    return CaseRegime("C", xi, sq=-xi)


def _modes(regime: CaseRegime, t):
    """Homogeneous modes f1, f2 and their integrals over [0, t]."""
    t = np.asarray(t, dtype=float)
    if regime.tag == "A":
        l1, l2 = regime.lambda1, regime.lambda2
        e1, e2 = np.exp(l1 * t), np.exp(l2 * t)
        return e1, e2, np.expm1(l1 * t) / l1, np.expm1(l2 * t) / l2
    h = np.exp(-0.5 * t)
    if regime.tag == "B":
        return h, t * h, -2.0 * np.expm1(-0.5 * t), 4.0 - (4.0 + 2.0 * t) * h
    om = regime.omega
    c, s = np.cos(om * t), np.sin(om * t)
    m0 = 0.25 + om * om
    # int_0^t e^{-s/2} cos(om s) ds and the sine counterpart
    ic = (h * (-0.5 * c + om * s) + 0.5) / m0
    is_ = (h * (-0.5 * s - om * c) + om) / m0
    return h * c, h * s, ic, is_


def _mode_coefficients(regime: CaseRegime, M0, M1, w0, w0p):
    """(P, Q) such that w = P f1 + Q f2 + (M1/M0) e^{-t}; pass M1=0 for x-derivatives."""
    r = M1 / M0
    if regime.tag == "A":
        l1, l2 = regime.lambda1, regime.lambda2
        den = l2 - l1
        return (l2 * w0 - w0p + l1 * r) / den, (-l1 * w0 + w0p - l2 * r) / den
    if regime.tag == "B":
        return w0 - r, 0.5 * w0 + w0p + 0.5 * r
    return w0 - r, (w0p + 0.5 * w0 + 0.5 * r) / regime.omega


@dataclass(frozen=True)
class LagrangianSolution:
    """Initial data of the Lagrangian oscillator, one per label x.

    ``w0``, ``w0p`` and their x-derivatives are vectorised callables.
    """

    regime: CaseRegime
    M0: float
    M1: float
    w0: Callable
    w0p: Callable
    dxw0: Callable
    dxw0p: Callable

    def coefficients(self, x):
        """Closed-form coefficients of w at labels x (C1,C2 / C3,C4 / C5,C6)."""
        return _mode_coefficients(self.regime, self.M0, self.M1, self.w0(x), self.w0p(x))

    def dx_coefficients(self, x):
        return _mode_coefficients(self.regime, self.M0, 0.0, self.dxw0(x), self.dxw0p(x))


def ode_coefficients(regime: CaseRegime, M0: float, M1: float, w0, w0p):
    """Coefficients of the closed form for scalar initial values (for direct checks)."""
    return _mode_coefficients(regime, M0, M1, np.asarray(w0, float), np.asarray(w0p, float))


def solve_ode(t, M0: float, M1: float, w0, w0p, tol_case: float = TOL_CASE):
    """w(t) for scalar/array initial values, without any spatial structure."""
    regime = classify_regime(M0, tol_case)
    P, Q = _mode_coefficients(regime, M0, M1, np.asarray(w0, float), np.asarray(w0p, float))
    f1, f2, _, _ = _modes(regime, t)
    return P * f1 + Q * f2 + (M1 / M0) * np.exp(-np.asarray(t, float))


def _profile_w0_prime(profile: InitialProfile, M0, first_moment):
    def w0p(x):
        x = np.asarray(x, dtype=float)
        return -profile.u(x) - (x + 1.0) * M0 + first_moment + 2.0 * profile.cdf(x)

    def dxw0p(x):
        return -profile.du(x) - M0 + 2.0 * profile.rho(x)

    return w0p, dxw0p


def _sampled_functions(d: InitialData, g: Grid):
    """Point-value callables reconstructed from cell samples (no analytic family)."""
    x, dx = g.centers, g.dx
    rho, u = np.asarray(d.rho0), np.asarray(d.u0)
    du = np.gradient(u, dx)
    cdf_faces = np.concatenate([[0.0], np.cumsum(rho) * dx])
    faces = g.faces

    def rho_f(y):
        return np.interp(y, x, rho, left=0.0, right=0.0)

    def cdf_f(y):
        return np.interp(y, faces, cdf_faces)

    return (lambda y: np.interp(y, x, u)), (lambda y: np.interp(y, x, du)), rho_f, cdf_f


def w0_prime(x, d, g: Optional[Grid] = None):
    """Initial time derivative of w:

        w0'(x) = -u0(x) - (x + 1) M0 + int y rho0 + 2 int_{-inf}^x rho0.

    ``d`` is an InitialProfile, or InitialData (its profile when attached,
    otherwise its samples on grid ``g``).
    """
    x = np.asarray(x, dtype=float)
    if isinstance(d, InitialData) and d.profile is not None:
        d = d.profile
    if isinstance(d, InitialProfile):
        return _profile_w0_prime(d, d.M0, d.first_moment)[0](x)
    if g is None:
        raise ValueError("sampled initial data need the grid")
    u_f, _, _, cdf_f = _sampled_functions(d, g)
    M0 = float(np.sum(d.rho0) * g.dx)
    first = float(np.sum(g.centers * d.rho0) * g.dx)
    return -u_f(x) - (x + 1.0) * M0 + first + 2.0 * cdf_f(x)


def solve_w(t, x, s: LagrangianSolution):
    """(w, dw/dx) at times t and labels x (broadcast together)."""
    t = np.asarray(t, dtype=float)
    f1, f2, _, _ = _modes(s.regime, t)
    P, Q = s.coefficients(x)
    dP, dQ = s.dx_coefficients(x)
    w = P * f1 + Q * f2 + (s.M1 / s.M0) * np.exp(-t)
    return w, dP * f1 + dQ * f2


def eta(t, x, s: LagrangianSolution):
    """(eta, d eta/dx) with eta = x + int_0^t w ds."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    _, _, i1, i2 = _modes(s.regime, t)
    P, Q = s.coefficients(x)
    dP, dQ = s.dx_coefficients(x)
    drift = -(s.M1 / s.M0) * np.expm1(-t)
    return x + P * i1 + Q * i2 + drift, 1.0 + dP * i1 + dQ * i2


@dataclass(frozen=True)
class EulerSolution:
    lag: LagrangianSolution
    rho0bar: Callable
    support: tuple
    cdf0: Optional[Callable] = None

    @classmethod
    def from_profile(cls, profile: InitialProfile, tol_case: float = TOL_CASE) -> "EulerSolution":
        M0, M1 = profile.M0, profile.M1
        w0p, dxw0p = _profile_w0_prime(profile, M0, profile.first_moment)
        lag = LagrangianSolution(
            regime=classify_regime(M0, tol_case),
            M0=M0,
            M1=M1,
            w0=profile.u,
            w0p=w0p,
            dxw0=profile.du,
            dxw0p=dxw0p,
        )
        return cls(lag=lag, rho0bar=profile.rho, support=profile.support, cdf0=profile.cdf)

    @classmethod
    def from_data(cls, d: InitialData, g: Grid, tol_case: float = TOL_CASE) -> "EulerSolution":
        if d.profile is not None:
            return cls.from_profile(d.profile, tol_case)
        u_f, du_f, rho_f, cdf_f = _sampled_functions(d, g)
        M0 = float(np.sum(d.rho0) * g.dx)
        M1 = float(np.sum(d.rho0 * d.u0) * g.dx)
        first = float(np.sum(g.centers * d.rho0) * g.dx)

        def w0p(x):
            x = np.asarray(x, dtype=float)
            return -u_f(x) - (x + 1.0) * M0 + first + 2.0 * cdf_f(x)

        def dxw0p(x):
            return -du_f(x) - M0 + 2.0 * rho_f(x)

        live = np.nonzero(np.asarray(d.rho0) > 0)[0]
        support = (float(g.faces[live[0]]), float(g.faces[live[-1] + 1]))
        lag = LagrangianSolution(classify_regime(M0, tol_case), M0, M1, u_f, w0p, du_f, dxw0p)
        return cls(lag=lag, rho0bar=rho_f, support=support, cdf0=cdf_f)


def _probes(t, e: EulerSolution, n_probes: int):
    a0, b0 = e.support
    xs = np.linspace(a0, b0, n_probes)
    ys, dys = eta(t, xs, e.lag)
    if np.any(dys <= 0) or np.any(np.diff(ys) <= 0):
        raise NonMonotoneError(f"eta(t={t}, .) is not increasing on the support")
    return xs, ys


def invert_eta(t: float, y, e: EulerSolution, tol_inv: float = TOL_INV, n_probes: int = N_PROBES):
    """Labels x with eta(t, x) = y: bracketed Newton with bisection fallback."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if t == 0.0:
        lo, hi = e.support
        if np.any((y < lo) | (y > hi)):
            raise DomainError("position outside the initial support")
        return y.copy()
    xs, ys = _probes(t, e, n_probes)
    if np.any((y < ys[0]) | (y > ys[-1])):
        raise DomainError(f"position outside eta(t={t}, support) = [{ys[0]}, {ys[-1]}]")
    k = np.clip(np.searchsorted(ys, y) - 1, 0, len(xs) - 2)
    lo, hi = xs[k].copy(), xs[k + 1].copy()
    x = lo + (hi - lo) * (y - ys[k]) / (ys[k + 1] - ys[k])
    tol = tol_inv * (1.0 + np.abs(y))
    for _ in range(200):
        val, dval = eta(t, x, e.lag)
        res = val - y
        done = np.abs(res) <= tol
        if np.all(done):
            return x
        lo = np.where(res < 0, x, lo)
        hi = np.where(res > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - res / dval
        ok = (newton > lo) & (newton < hi) & (dval > 0)
        x = np.where(done, x, np.where(ok, newton, 0.5 * (lo + hi)))
    raise RuntimeError("invert_eta did not converge")


def euler_state_at(t: float, g: Grid, e: EulerSolution, cell_average: bool = False):
    """(rho_bar, u_bar) on the grid at time t, zero outside eta(t, support).

    Point values use rho_bar = rho0(x)/eta_x(t, x) at the pre-image of each
    centre. With ``cell_average`` the density is the exact cell mean
    (cdf0(X(face_right)) - cdf0(X(face_left)))/dx, which conserves mass exactly.
    """
    y = g.centers
    a0, b0 = e.support
    if t == 0.0:
        lo, hi = a0, b0
    else:
        lo, hi = (float(v) for v in eta(t, np.array([a0, b0]), e.lag)[0])
    inside = (y > lo) & (y < hi)
    rho = np.zeros(g.n_cells)
    u = np.zeros(g.n_cells)
    if np.any(inside):
        x = invert_eta(t, y[inside], e)
        w, _ = solve_w(t, x, e.lag)
        u[inside] = w
        if not cell_average:
            _, dxeta = eta(t, x, e.lag)
            rho[inside] = e.rho0bar(x) / dxeta
    if cell_average:
        if e.cdf0 is None:
            raise ValueError("cell averages need the initial cumulative mass")
        faces = np.clip(g.faces, lo, hi)
        xf = np.where(faces <= lo, a0, np.where(faces >= hi, b0, 0.0))
        mid = (faces > lo) & (faces < hi)
        if np.any(mid):
            xf[mid] = invert_eta(t, faces[mid], e)
        rho = np.diff(e.cdf0(xf)) / g.dx
        rho = np.maximum(rho, 0.0)
        # edge cells whose centre lies outside the image take the boundary velocity
        edge = (rho > 0) & ~inside
        if np.any(edge):
            w_ab, _ = solve_w(t, np.array([a0, b0]), e.lag)
            u[edge] = np.where(y[edge] <= lo, w_ab[0], w_ab[1])
    return rho, u
