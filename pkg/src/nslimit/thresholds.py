"""Pointwise blow-up classification for the pressureless limit.

Each check works on the triple (M0, rho0(x), du0(x)) and returns a
ConditionResult that also records how close the decisive inequalities were
to equality (``margin``); points within MARGIN of a boundary are marginal.

The crossing scan is the independent oracle: it looks for the first zero of
d eta/dx(t, x) directly on the closed-form solution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .euler_exact import EulerSolution, _modes, classify_regime
from .model import InitialData
from .profiles import InitialProfile

MARGIN = 1e-6


@dataclass(frozen=True)
class ConditionResult:
    matched: bool
    sets: tuple = ()
    margin: float = np.inf
    flag: Optional[str] = None
    values: dict = field(default_factory=dict)

    @property
    def marginal(self) -> bool:
        return self.margin <= MARGIN


@dataclass(frozen=True)
class BlowupVerdict:
    outcome: str
    witness: Optional[float] = None
    matched_set: Optional[str] = None
    crossing_time: Optional[float] = None
    crossing_x: Optional[float] = None
    marginal: bool = False
    rows: tuple = ()

    def __post_init__(self):
        if self.outcome == "Blowup" and self.witness is None:
            raise ValueError("a blow-up verdict needs a witness")


def case_a_condition(M0: float, rho: float, du: float) -> ConditionResult:
    regime = classify_regime(M0)
    l1, l2, root = regime.lambda1, regime.lambda2, np.sqrt(regime.xi)
    first = -du
    second = l1 * du - (M0 - 2 * rho)
    vals = {"du0": du, "rho0": rho, "cond1": first, "cond2": second}
    if not (first > 0 and second > 0):
        return ConditionResult(False, margin=min(abs(first), abs(second)), values=vals)
    base1 = l1 * du - M0 + 2 * rho
    base2 = l2 * du - M0 + 2 * rho
    if base1 <= 0 or base2 <= 0:
        return ConditionResult(False, margin=0.0, flag="nonpositive base", values=vals)
    rhs = base1 ** (-l2 / root) * base2 ** (l1 / root)
    third = rhs - 2 * rho
    vals["cond3"] = third
    margin = min(first, second, abs(third))
    return ConditionResult(third >= 0, ("A",) if third >= 0 else (), margin, values=vals)


def case_b_condition(rho: float, du: float) -> ConditionResult:
    first = min(0.0, 4 * rho - 0.5) - du
    vals = {"du0": du, "rho0": rho, "cond1": first}
    if not first > 0:
        return ConditionResult(False, margin=abs(first), values=vals)
    den = 8 * rho - 2 * du - 1
    arg = 8 * rho / den
    if not arg > 0:
        return ConditionResult(False, margin=0.0, flag="nonpositive log argument", values=vals)
    second = 2 * du / den - np.log(arg)
    vals["cond2"] = second
    margin = min(first, abs(second))
    return ConditionResult(second >= 0, ("B",) if second >= 0 else (), margin, values=vals)


def case_c_quantities(M0: float, rho: float, du: float) -> dict:
    sq = 4 * M0 - 1
    rs = np.sqrt(sq)
    dc5 = du
    dc6 = (2 / rs) * (-0.5 * du - M0 + 2 * rho)
    radicand = (1 + sq) / sq * du**2 + 4 / sq * (2 * rho - M0) * (2 * rho - M0 - du)
    c7 = (2 * rs / (1 + sq)) * np.sqrt(radicand) if radicand >= 0 else np.nan
    den = 4 * rho - 2 * M0 - du
    num = rs * du
    if den == 0:
        c8 = np.copysign(np.pi / 2, num) if num != 0 else 0.0
    else:
        c8 = float(np.arctan(num / den))
    return {"dC5": dc5, "dC6": dc6, "C7": c7, "C8": c8, "radicand": radicand, "sq": sq}


_C_SETS = (
    ("S1", -1, +1, 0.0),
    ("S2", +1, -1, np.pi),
    ("S3", -1, -1, np.pi),
    ("S4", +1, +1, 2 * np.pi),
)


def case_c_condition(M0: float, rho: float, du: float) -> ConditionResult:
    q = case_c_quantities(M0, rho, du)
    vals = {"du0": du, "rho0": rho, **q}
    sign_margin = min(abs(q["dC5"]), abs(q["dC6"]))
    if q["radicand"] < 0:
        return ConditionResult(False, margin=0.0, flag="negative radicand", values=vals)
    hits, margins = [], [sign_margin]
    for name, s5, s6, shift in _C_SETS:
        if s5 * q["dC5"] > 0 and s6 * q["dC6"] > 0:
            lhs = 2 * rho / M0 - q["C7"] * np.exp((q["C8"] - shift) / np.sqrt(q["sq"]))
            vals[f"{name}_lhs"] = lhs
            margins.append(abs(lhs))
            if lhs <= 0:
                hits.append(name)
    return ConditionResult(bool(hits), tuple(hits), min(margins), values=vals)


def _pointwise(d):
    if isinstance(d, InitialData):
        if d.profile is None:
            raise ValueError("classification needs an analytic profile")
        d = d.profile
    if not isinstance(d, InitialProfile):
        raise TypeError(f"expected InitialProfile or InitialData, got {type(d).__name__}")
    return d


def check_case_A(x: float, d) -> ConditionResult:
    d = _pointwise(d)
    return case_a_condition(d.M0, float(d.rho(x)), float(d.du(x)))


def check_case_B(x: float, d) -> ConditionResult:
    d = _pointwise(d)
    return case_b_condition(float(d.rho(x)), float(d.du(x)))


def check_case_C(x: float, d) -> ConditionResult:
    d = _pointwise(d)
    return case_c_condition(d.M0, float(d.rho(x)), float(d.du(x)))


def check_point(M0: float, rho: float, du: float) -> ConditionResult:
    tag = classify_regime(M0).tag
    if tag == "A":
        return case_a_condition(M0, rho, du)
    if tag == "B":
        return case_b_condition(rho, du)
    return case_c_condition(M0, rho, du)


def default_sample_xs(d, n: int = 64) -> np.ndarray:
    """Interior labels of the support where the density is positive."""
    d = _pointwise(d)
    a, b = d.support
    xs = np.linspace(a, b, n + 2)[1:-1]
    return xs[d.rho(xs) > 0]


def classify(d, sample_xs: Optional[Sequence[float]] = None, t_max: float = 50.0) -> BlowupVerdict:
    d = _pointwise(d)
    xs = default_sample_xs(d) if sample_xs is None else np.asarray(sample_xs, float)
    tag = classify_regime(d.M0).tag
    rows, witness, wset, marginal = [], None, None, False
    for x in xs:
        res = check_point(d.M0, float(d.rho(x)), float(d.du(x)))
        rows.append((float(x), tag, res))
        marginal = marginal or res.marginal
        if res.matched and witness is None:
            witness, wset = float(x), ("CaseA-condition" if tag == "A" else
                                       "CaseB-condition" if tag == "B" else "|".join(res.sets))
    if witness is None:
        return BlowupVerdict("Global", marginal=marginal, rows=tuple(rows))
    hit = crossing_scan(d, t_max, xs)
    return BlowupVerdict(
        "Blowup",
        witness=witness,
        matched_set=wset,
        crossing_time=None if hit is None else hit[0],
        crossing_x=None if hit is None else hit[1],
        marginal=marginal,
        rows=tuple(rows),
    )


def _bisect(f, lo, hi, n: int = 100):
    flo = f(lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def crossing_scan(d, t_max: float, sample_xs: Optional[Sequence[float]] = None, n_t: int = 4001):
    """Earliest (t*, x*) with d eta/dx(t*, x*) = 0 over the label fan, or None.

    Each label is scanned on a uniform time grid for sign changes of eta_x and
    for local minima of eta_x (sign changes of its derivative dw/dx), so that
    grazing crossings between grid points are not missed.
    """
    if t_max <= 0:
        return None
    e = d if isinstance(d, EulerSolution) else EulerSolution.from_profile(_pointwise(d))
    if sample_xs is None:
        a, b = e.support
        sample_xs = np.linspace(a, b, 66)[1:-1]
    xs = np.asarray(sample_xs, dtype=float)
    ts = np.linspace(0.0, t_max, n_t)
    regime = e.lag.regime
    dP, dQ = e.lag.dx_coefficients(xs)

    def jac_djac(t, j):
        f1, f2, i1, i2 = _modes(regime, t)
        return 1.0 + dP[j] * i1 + dQ[j] * i2, dP[j] * f1 + dQ[j] * f2

    f1, f2, i1, i2 = _modes(regime, ts[:, None])
    J = 1.0 + dP * i1 + dQ * i2
    dJ = dP * f1 + dQ * f2
    best = None
    for j, x in enumerate(xs):
        jac = lambda t: float(jac_djac(t, j)[0])  # noqa: E731
        djac = lambda t: float(jac_djac(t, j)[1])  # noqa: E731
        col, dcol = J[:, j], dJ[:, j]
        cands = []
        neg = np.nonzero(col <= 0)[0]
        if neg.size:
            k = neg[0]
            cands.append(0.0 if k == 0 else _bisect(jac, ts[k - 1], ts[k]))
        mins = np.nonzero((dcol[:-1] < 0) & (dcol[1:] >= 0))[0]
        for k in mins:
            if cands and ts[k] >= cands[0]:
                break
            tm = _bisect(djac, ts[k], ts[k + 1])
            if jac(tm) <= 0:
                cands.append(_bisect(jac, ts[k], tm) if jac(ts[k]) > 0 else ts[k])
                break
        if cands:
            tc = min(cands)
            if best is None or tc < best[0]:
                best = (float(tc), float(x))
    return best
