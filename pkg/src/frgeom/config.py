"""Run configuration: JSON in, canonical JSON out.

A configuration has four sections::

    {
      "command": "shoot",
      "coefficients": {"preset": "reciprocal"},
      "grid": {"n_points": 16, "weights": "uniform"},
      "params": {...command specific...},
      "output": {"dir": "out", "svg": false, "fields": false}
    }

:func:`parse` fills every default, so ``parse(emit(c)) == c`` and
``emit(parse(text))`` is the canonical form of ``text``.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .coeffs import DIRECT_PROFILES, PRESETS, ArcProfile, CoefficientSpec, profile_for, spec_from_dict
from .errors import ConfigError, GeometryError
from .manifold import Grid, ScalarField, SpherePoint

COMMANDS = ("shoot", "connect", "report", "profile")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "shoot": {
        "r0": 1.0,
        "psi_norm": 1.0,
        "r_t0": [0.0],
        "t_end": 2 * math.pi,
        "n_steps": 1000,
        "phi0": "uniform",
        "direction": None,
        "allow_boundary_hits": False,
        "adaptive": False,
    },
    "connect": {
        "r0": 1.0,
        "r1": 1.0,
        "theta1": 0.0,
        "phi0": "uniform",
        "phi1": None,
        "tol": 1e-9,
        "n_starts": 32,
        "n_samples": 65,
    },
    "report": {"s_range": None, "n_samples": 25, "quad_tol": 1e-10},
    "profile": {"s_range": None, "n": 201},
}

_SECTIONS = ("command", "coefficients", "grid", "params", "output")


def _number(x, key, positive=False, integer=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{key} must be a number, got {x!r}")
    if integer:
        if float(x) != int(x):
            raise ConfigError(f"{key} must be an integer, got {x!r}")
        x = int(x)
    else:
        x = float(x)
        if not math.isfinite(x):
            raise ConfigError(f"{key} must be finite")
    if positive and x <= 0:
        raise ConfigError(f"{key} must be positive, got {x!r}")
    return x


def _vector(x, key, allow=("uniform",)):
    if x is None or (isinstance(x, str) and x in allow):
        return x
    if not isinstance(x, list) or not x:
        raise ConfigError(f"{key} must be a nonempty list of numbers or one of {allow}")
    return [_number(v, f"{key}[]") for v in x]


def _canon_coefficients(c) -> dict:
    if isinstance(c, str):
        c = {"preset": c}
    if not isinstance(c, Mapping):
        raise ConfigError("coefficients must be a preset name or an object")
    c = dict(c)
    if "profile" in c:
        if c["profile"] not in DIRECT_PROFILES or len(c) != 1:
            raise ConfigError(f"unknown direct profile {c['profile']!r}")
        return c
    if "preset" in c:
        if c["preset"] not in PRESETS:
            raise ConfigError(f"unknown preset {c['preset']!r}")
        return {k: (v if k == "preset" else _number(v, k)) for k, v in c.items()}
    if "expression" in c:
        e = c["expression"]
        if not isinstance(e, Mapping) or set(e) != {"c1", "c2"}:
            raise ConfigError("expression needs exactly the keys c1 and c2")
        try:
            spec = spec_from_dict(c)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad expression: {exc}") from exc
        return spec.to_dict()
    raise ConfigError("coefficients need one of: preset, expression, profile")


def _canon_grid(g) -> dict:
    g = dict(g or {})
    unknown = set(g) - {"n_points", "weights"}
    if unknown:
        raise ConfigError(f"unknown grid keys {sorted(unknown)}")
    weights = g.get("weights", "uniform")
    if weights == "uniform":
        n = _number(g.get("n_points", 16), "grid.n_points", positive=True, integer=True)
    else:
        weights = _vector(weights, "grid.weights", allow=())
        n = len(weights)
        if "n_points" in g and g["n_points"] != n:
            raise ConfigError("grid.n_points disagrees with len(grid.weights)")
    if n < 2:
        raise ConfigError("grid needs at least 2 points")
    return {"n_points": n, "weights": weights}


def _canon_params(command: str, p) -> dict:
    p = dict(p or {})
    defaults = _DEFAULTS[command]
    unknown = set(p) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown {command} parameters {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    out.update(p)
    for key, val in list(out.items()):
        name = f"params.{key}"
        if key in ("phi0", "phi1", "direction"):
            out[key] = _vector(val, name)
        elif key == "r_t0":
            out[key] = _vector(val if isinstance(val, list) else [val], name, allow=())
        elif key == "s_range":
            if val is not None:
                if not (isinstance(val, list) and len(val) == 2):
                    raise ConfigError(f"{name} must be [lo, hi]")
                lo, hi = (_number(v, name) for v in val)
                if not lo < hi:
                    raise ConfigError(f"{name} must be increasing")
                out[key] = [lo, hi]
        elif key in ("allow_boundary_hits", "adaptive"):
            if not isinstance(val, bool):
                raise ConfigError(f"{name} must be true or false")
        elif key in ("n_steps", "n_starts", "n_samples", "n"):
            out[key] = _number(val, name, positive=True, integer=True)
        elif key == "theta1":
            out[key] = _number(val, name)
            if not 0 <= out[key] <= math.pi:
                raise ConfigError(f"{name} must lie in [0, pi]")
        elif key == "psi_norm":
            out[key] = _number(val, name)
            if out[key] < 0:
                raise ConfigError(f"{name} must be nonnegative")
        else:
            out[key] = _number(val, name, positive=True)
    if command == "shoot" and out["n_steps"] < 8:
        raise ConfigError("params.n_steps must be at least 8")
    if command == "profile" and out["n"] < 2:
        raise ConfigError("params.n must be at least 2")
    return out


def _canon_output(o) -> dict:
    o = dict(o or {})
    unknown = set(o) - {"dir", "svg", "fields"}
    if unknown:
        raise ConfigError(f"unknown output keys {sorted(unknown)}")
    out = {"dir": str(o.get("dir", "out")), "svg": o.get("svg", False),
           "fields": o.get("fields", False)}
    for k in ("svg", "fields"):
        if not isinstance(out[k], bool):
            raise ConfigError(f"output.{k} must be true or false")
    return out


@dataclass(frozen=True)
class RunConfig:
    command: str
    coefficients: dict
    grid: dict
    params: dict
    output: dict

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        if not isinstance(d, Mapping):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(d) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown sections {sorted(unknown)}")
        command = d.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
        if "coefficients" not in d:
            raise ConfigError("missing coefficients")
        coefficients = _canon_coefficients(d["coefficients"])
        if "profile" in coefficients and command != "profile" and command != "report":
            raise ConfigError(f"direct profiles only support profile and report, not {command}")
        return cls(command, coefficients, _canon_grid(d.get("grid")),
                   _canon_params(command, d.get("params")), _canon_output(d.get("output")))

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "coefficients": copy.deepcopy(self.coefficients),
            "grid": copy.deepcopy(self.grid),
            "params": copy.deepcopy(self.params),
            "output": copy.deepcopy(self.output),
        }

    def with_overrides(self, preset=None, out=None, steps=None, tol=None, svg=None) -> "RunConfig":
        """Apply command-line flags; ``None`` leaves a value unchanged."""
        d = self.to_dict()
        if preset is not None:
            d["coefficients"] = {"profile": preset} if preset in DIRECT_PROFILES else {"preset": preset}
        if out is not None:
            d["output"]["dir"] = out
        if svg:
            d["output"]["svg"] = True
        key = {"shoot": "n_steps", "profile": "n", "report": "n_samples"}.get(self.command)
        if steps is not None:
            if key is None:
                raise ConfigError(f"--steps does not apply to {self.command}")
            d["params"][key] = steps
        if tol is not None:
            key = {"connect": "tol", "report": "quad_tol"}.get(self.command)
            if key is None:
                raise ConfigError(f"--tol does not apply to {self.command}")
            d["params"][key] = tol
        return RunConfig.from_dict(d)

    # -- realized objects ----------------------------------------------------

    def spec(self) -> CoefficientSpec | None:
        if "profile" in self.coefficients:
            return None
        try:
            return spec_from_dict(self.coefficients)
        except (GeometryError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def profile(self) -> ArcProfile:
        if "profile" in self.coefficients:
            return DIRECT_PROFILES[self.coefficients["profile"]]()
        return profile_for(self.spec())

    def make_grid(self) -> Grid:
        w = self.grid["weights"]
        if w == "uniform":
            return Grid.uniform(self.grid["n_points"])
        try:
            return Grid.normalized(w)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def sphere_point(self, key: str) -> SpherePoint:
        """``params[key]`` as a unit field (``"uniform"`` gives the constant field)."""
        grid = self.make_grid()
        v = self.params[key]
        if v == "uniform" or v is None:
            return SpherePoint.normalize(grid.constant(1.0))
        if len(v) != grid.n_points:
            raise ConfigError(f"params.{key} has {len(v)} values for {grid.n_points} grid points")
        field = ScalarField(np.asarray(v, dtype=float), grid)
        if field.norm() < 1e-12:
            raise ConfigError(f"params.{key} is the zero field")
        return SpherePoint.normalize(field)

    def field(self, key: str) -> ScalarField | None:
        v = self.params[key]
        if v is None:
            return None
        grid = self.make_grid()
        if len(v) != grid.n_points:
            raise ConfigError(f"params.{key} has {len(v)} values for {grid.n_points} grid points")
        return ScalarField(np.asarray(v, dtype=float), grid)


def parse(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def emit(config: RunConfig) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(config.to_dict(), sort_keys=True, indent=2) + "\n"


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
