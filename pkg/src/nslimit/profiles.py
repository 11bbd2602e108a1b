"""Analytic initial-data families (density and velocity profiles).

Every density carries a compact support interval ``[a, b]`` (Gaussians are
cut at 40 standard deviations) and an accurate cumulative mass function,
built from composite Gauss-Legendre quadrature on that interval.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class _Quadrature:
    """Composite 8-point Gauss-Legendre rule with a cumulative table."""

    def __init__(self, f, a: float, b: float, n_panels: int = 2048):
        self.f, self.a, self.b = f, a, b
        self.edges = np.linspace(a, b, n_panels + 1)
        self.cum = np.concatenate([[0.0], np.cumsum(self._panel(self.edges[:-1], self.edges[1:]))])

    def _panel(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[..., None] + half[..., None] * _GL_NODES
        return half * np.sum(self.f(pts) * _GL_WEIGHTS, axis=-1)

    @property
    def total(self) -> float:
        return float(self.cum[-1])

    def cumulative(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        k = np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, len(self.edges) - 2)
        return self.cum[k] + self._panel(self.edges[k], x)


class Density:
    a: float
    b: float

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class StepDensity(Density):
    """height * (1 + ripple*sin(2 pi waves (x-a)/(b-a))) on [a, b], zero outside."""

    a: float
    b: float
    height: float
    ripple: float = 0.0
    waves: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("step needs b > a")
        if self.height <= 0 or abs(self.ripple) >= 1:
            raise ValueError("step needs height > 0 and |ripple| < 1")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        s = (x - self.a) / (self.b - self.a)
        val = self.height * (1.0 + self.ripple * np.sin(2 * np.pi * self.waves * s))
        return np.where((x >= self.a) & (x <= self.b), val, 0.0)


@dataclass(frozen=True)
class GaussianDensity(Density):
    mass: float
    center: float
    width: float

    @property
    def a(self):
        return self.center - 40.0 * self.width

    @property
    def b(self):
        return self.center + 40.0 * self.width

    def __call__(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.mass / (self.width * np.sqrt(2 * np.pi)) * np.exp(-0.5 * z * z)


@dataclass(frozen=True)
class BumpDensity(Density):
    """Normalised (1 - s^2)^power bump of given mass and half width."""

    mass: float
    center: float
    half_width: float
    power: float = 3.0

    @property
    def a(self):
        return self.center - self.half_width

    @property
    def b(self):
        return self.center + self.half_width

    @property
    def _norm(self):
        from scipy.special import beta

        # int_{-1}^{1} (1-s^2)^p ds = B(1/2, p+1)
        return self.mass / (self.half_width * beta(0.5, self.power + 1.0))

    def __call__(self, x):
        s = (np.asarray(x, dtype=float) - self.center) / self.half_width
        return self._norm * np.clip(1.0 - s * s, 0.0, None) ** self.power


@dataclass(frozen=True)
class TableDensity(Density):
    """Piecewise-linear density through tabulated (x, value) nodes."""

    xs: tuple
    values: tuple

    @property
    def a(self):
        return float(self.xs[0])

    @property
    def b(self):
        return float(self.xs[-1])

    def __call__(self, x):
        return np.interp(x, self.xs, self.values, left=0.0, right=0.0)


class Velocity:
    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, x) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class WaveVelocity(Velocity):
    """offset + slope*x + amplitude*sin(wavenumber*x + phase)."""

    offset: float = 0.0
    slope: float = 0.0
    amplitude: float = 0.0
    wavenumber: float = 1.0
    phase: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.offset + self.slope * x + self.amplitude * np.sin(self.wavenumber * x + self.phase)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.slope + self.amplitude * self.wavenumber * np.cos(self.wavenumber * x + self.phase)


@dataclass(frozen=True)
class TableVelocity(Velocity):
    """Linear interpolation of tabulated samples; derivative by central differences."""

    xs: tuple
    values: tuple

    def __call__(self, x):
        return np.interp(x, self.xs, self.values)

    def derivative(self, x):
        slopes = np.gradient(np.asarray(self.values, float), np.asarray(self.xs, float))
        return np.interp(x, self.xs, slopes)


class InitialProfile:
    """A density family paired with a velocity family."""

    def __init__(self, density: Density, velocity: Velocity | None = None, n_panels: int = 2048):
        self.density = density
        self.velocity = velocity if velocity is not None else WaveVelocity()
        a, b = density.a, density.b
        self.support = (float(a), float(b))
        self._mass = _Quadrature(density, a, b, n_panels)
        self.M0 = self._mass.total
        self.M1 = _Quadrature(lambda x: density(x) * self.velocity(x), a, b, n_panels).total
        self.first_moment = _Quadrature(lambda x: x * density(x), a, b, n_panels).total

    def rho(self, x):
        return self.density(x)

    def u(self, x):
        return self.velocity(x)

    def du(self, x):
        return self.velocity.derivative(x)

    def cdf(self, x):
        """Mass to the left of x."""
        return self._mass.cumulative(x)

    def __repr__(self):
        return f"InitialProfile({self.density!r}, {self.velocity!r})"


def read_table(path) -> tuple[tuple, tuple]:
    """Two-column CSV (x, value); a non-numeric first row is taken as a header."""
    xs, vs = [], []
    with open(Path(path), newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError:
                if xs:
                    raise
                continue
            xs.append(x)
            vs.append(v)
    order = np.argsort(xs)
    if len(xs) < 2 or np.any(np.diff(np.asarray(xs)[order]) <= 0):
        raise ValueError(f"{path}: need >= 2 rows with distinct x")
    return tuple(np.asarray(xs)[order]), tuple(np.asarray(vs)[order])
