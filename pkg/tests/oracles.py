"""Independent reference computations used by the tests.

Nothing here imports the package's numerical kernels; these are the slow,
obvious versions the fast code is checked against.
"""
from __future__ import annotations

import numpy as np


def brute_potential(x, rho, dx):
    diff = x[:, None] - x[None, :]
    W = -np.abs(diff) + 0.5 * diff**2
    return W @ rho * dx


def brute_force(x, rho, dx):
    diff = x[:, None] - x[None, :]
    dW = -np.sign(diff) + diff
    return dW @ rho * dx


def brute_energy(x, rho, dx):
    return 0.5 * float(rho @ brute_potential(x, rho, dx)) * dx


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_adaptive(f, y0, t_out, tol=1e-13, h0=1e-3):
    """Classical RK4 with step doubling; returns y at each time in t_out (increasing)."""
    y = np.asarray(y0, dtype=float)
    t = 0.0
    h = h0
    out = []
    for target in t_out:
        while t < target:
            h = min(h, target - t)
            full = _rk4_step(f, t, y, h)
            half = _rk4_step(f, t + 0.5 * h, _rk4_step(f, t, y, 0.5 * h), 0.5 * h)
            err = float(np.max(np.abs(half - full))) / 15.0
            if err <= tol * max(1.0, float(np.max(np.abs(half)))) or h < 1e-10:
                t += h
                y = half + (half - full) / 15.0
                h *= min(2.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2)
            else:
                h *= max(0.2, 0.9 * (tol / err) ** 0.2)
        out.append(y.copy())
    return np.array(out)


def oscillator_rhs(M0, M1):
    def f(t, y):
        return np.array([y[1], -y[1] - M0 * y[0] + M1 * np.exp(-t)])

    return f


def jacobian_ode_rhs(M0, rho0):
    """d = eta_x obeys d'' + d' + M0 d = 2 rho0(x)."""

    def f(t, y):
        return np.array([y[1], -y[1] - M0 * y[0] + 2.0 * rho0])

    return f


def first_zero(M0, rho0, du0, t_max=50.0):
    """First t with eta_x = 0 by DOP853 integration with a zero event, or None."""
    from scipy.integrate import solve_ivp

    def hit(t, y):
        return y[0]

    hit.terminal = True
    hit.direction = -1
    sol = solve_ivp(jacobian_ode_rhs(M0, rho0), (0.0, t_max), [1.0, du0], method="DOP853",
                    rtol=1e-11, atol=1e-13, events=hit, max_step=0.25)
    return float(sol.t_events[0][0]) if sol.t_events[0].size else None
