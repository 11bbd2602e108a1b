"""JSON run configuration: schema, loading and construction of model objects."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .model import Grid, InitialData, Params
from .ns_solver import SchemeConfig
from .profiles import (
    BumpDensity,
    GaussianDensity,
    InitialProfile,
    StepDensity,
    TableDensity,
    TableVelocity,
    WaveVelocity,
    read_table,
)

EXPERIMENT_KINDS = ("simulate", "exact", "classify", "sweep", "verify", "refine")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}

_DENSITY = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "step"}, "a": _num, "b": _num, "height": _pos,
                           "ripple": _num, "waves": _pos},
            "required": ["kind", "a", "b", "height"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "gaussian"}, "mass": _pos, "center": _num, "width": _pos},
            "required": ["kind", "mass", "center", "width"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "bump"}, "mass": _pos, "center": _num, "half_width": _pos,
                           "power": _pos},
            "required": ["kind", "mass", "center", "half_width"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "table"}, "path": {"type": "string"}},
            "required": ["kind", "path"],
            "additionalProperties": False,
        },
    ]
}

_VELOCITY = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "wave"}, "offset": _num, "slope": _num, "amplitude": _num,
                           "wavenumber": _num, "phase": _num},
            "required": ["kind"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "table"}, "path": {"type": "string"}},
            "required": ["kind", "path"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "model": {
            "type": "object",
            "properties": {
                "x_min": _num,
                "x_max": _num,
                "n_cells": {"type": "integer", "minimum": 8},
                "epsilon": {"type": "number", "minimum": 0},
                "gamma": {"type": "number", "exclusiveMinimum": 1, "maximum": 1.5},
                "kappa": {"type": ["number", "null"]},
                "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "vac_threshold": _pos,
                "initial": {
                    "type": "object",
                    "properties": {
                        "density": _DENSITY,
                        "velocity": _VELOCITY,
                        "prescribe": {"enum": ["u", "v"]},
                    },
                    "required": ["density"],
                    "additionalProperties": False,
                },
            },
            "required": ["x_min", "x_max", "n_cells", "initial"],
            "additionalProperties": False,
        },
        "scheme": {
            "type": "object",
            "properties": {
                "t_end": {"type": "number", "minimum": 0},
                "snapshot_every": {"type": "integer", "minimum": 1},
                "dt_policy": {"enum": ["cfl", "fixed"]},
                "dt": {"type": ["number", "null"]},
                "boundary": {"enum": ["zero-flux"]},
            },
            "required": ["t_end"],
            "additionalProperties": False,
        },
        "experiment": {
            "type": "object",
            "properties": {
                "kind": {"enum": list(EXPERIMENT_KINDS)},
                "reference": {"type": "boolean"},
                "times": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
                "t_max": _pos,
                "n_samples": {"type": "integer", "minimum": 1},
                "epsilons": {"type": "array", "items": _pos, "minItems": 3},
                "n_base": {"type": "integer", "minimum": 8},
                "levels": {"type": "array", "items": {"type": "integer", "minimum": 8}, "minItems": 3},
                "trajectory": {"type": "string"},
                "bump": {
                    "type": "object",
                    "properties": {"center": _num, "width": _pos, "t_center": _num, "t_width": _pos,
                                   "order": {"type": "integer", "minimum": 3}},
                    "required": ["center", "width", "t_center", "t_width"],
                    "additionalProperties": False,
                },
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "out_dir": {"type": "string"},
    },
    "required": ["model", "scheme", "experiment"],
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid configuration file (malformed JSON or schema violation)."""


@dataclass(frozen=True)
class RunConfig:
    x_min: float
    x_max: float
    n_cells: int
    params: Params
    initial: dict
    scheme: SchemeConfig
    experiment: dict
    out_dir: Path
    base_dir: Path = field(default_factory=Path.cwd)

    @property
    def kind(self) -> str:
        return self.experiment["kind"]

    @property
    def prescribe(self) -> str:
        return self.initial.get("prescribe", "u")

    def grid(self, n_cells: Optional[int] = None) -> Grid:
        return Grid(self.x_min, self.x_max, self.n_cells if n_cells is None else n_cells)

    def with_epsilon(self, epsilon: float) -> "RunConfig":
        return replace(self, params=replace(self.params, epsilon=epsilon))

    def profile(self) -> InitialProfile:
        return build_profile(self.initial, self.base_dir)

    def initial_data(self, g: Optional[Grid] = None, p: Optional[Params] = None) -> InitialData:
        g = g or self.grid()
        p = p or self.params
        return InitialData.from_profile(self.profile(), g, p, prescribe=self.prescribe)


def _resolve(path: str, base_dir: Path) -> Path:
    q = Path(path)
    return q if q.is_absolute() else base_dir / q


def build_profile(initial: dict, base_dir: Path = Path(".")) -> InitialProfile:
    dens = dict(initial["density"])
    kind = dens.pop("kind")
    if kind == "step":
        density = StepDensity(**dens)
    elif kind == "gaussian":
        density = GaussianDensity(**dens)
    elif kind == "bump":
        density = BumpDensity(**dens)
    else:
        xs, vs = read_table(_resolve(dens["path"], base_dir))
        density = TableDensity(xs, vs)
    vel = dict(initial.get("velocity", {"kind": "wave"}))
    vkind = vel.pop("kind")
    if vkind == "wave":
        velocity = WaveVelocity(**vel)
    else:
        xs, vs = read_table(_resolve(vel["path"], base_dir))
        velocity = TableVelocity(xs, vs)
    return InitialProfile(density, velocity)


def parse_config(raw: dict, base_dir: Path = Path(".")) -> RunConfig:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(k) for k in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    m, s = raw["model"], raw["scheme"]
    try:
        params = Params(
            epsilon=m.get("epsilon", 0.0),
            gamma=m.get("gamma", 1.5),
            kappa=m.get("kappa"),
            vac_threshold=m.get("vac_threshold", 1e-12),
            cfl=m.get("cfl", 0.4),
        )
        scheme = SchemeConfig(
            t_end=s["t_end"],
            snapshot_every=s.get("snapshot_every", 1),
            dt_policy=s.get("dt_policy", "cfl"),
            dt=s.get("dt"),
            boundary=s.get("boundary", "zero-flux"),
        )
        Grid(m["x_min"], m["x_max"], m["n_cells"])
    except ValueError as exc:
        raise ConfigError(f"config invalid: {exc}") from None
    return RunConfig(
        x_min=float(m["x_min"]),
        x_max=float(m["x_max"]),
        n_cells=int(m["n_cells"]),
        params=params,
        initial=m["initial"],
        scheme=scheme,
        experiment=raw["experiment"],
        out_dir=_resolve(raw.get("out_dir", "out"), base_dir),
        base_dir=base_dir,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(raw, path.parent)
