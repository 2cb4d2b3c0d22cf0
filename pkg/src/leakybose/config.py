"""Scenario configuration files.

A scenario is a YAML mapping; see ``docs/config.md`` for the schema. Every
value is checked on load, and errors name the offending key and its line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml
from scipy import constants

from .bogoliubov import FluxParams, GasParams
from .errors import ValidationError
from .evolution import LeakSchedule

SCHEMA: dict[str, Any] = {
    "gas": {"a": float, "n": float, "V": float, "m": float, "hbar": float, "n0": float},
    "flux": {"J": float, "lambda": float, "v_boundary": float, "env_volume": float, "J_cr": float},
    "schedule": {"t_grid": list, "N": int, "M_phi": int},
    "bogoliubov": {"q_max": float, "n_quad": int},
    "states": {"N": int, "alpha_sq": float, "xi_sq": float, "phi": float},
    "measure": {
        "kind": str,
        "t": float,
        "center": float,
        "err": float,
        "shape": str,
        "M_phi": int,
    },
    "interfere": {"box_a": dict, "box_b": dict, "err": float, "shape": str, "runs": int, "M_phi": int},
    "output": {"path": str, "format": str},
    "seed": int,
}
REQUIRED = {"gas": ("a", "n", "V")}


def _line_index(text: str) -> dict[tuple, int]:
    """Map key paths to 1-based source lines."""
    lines: dict[tuple, int] = {}

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                sub = path + (key.value,)
                lines[sub] = key.start_mark.line + 1
                walk(value, sub)

    root = yaml.compose(text)
    if root is not None:
        walk(root, ())
    return lines


def _fail(msg: str, path: tuple, lines: dict) -> ValidationError:
    where = f" (line {lines[path]})" if path in lines else ""
    key = ".".join(map(str, path))
    return ValidationError(f"config {key}{where}: {msg}")


def _coerce(value, kind, path, lines):
    if value is None:
        return None
    if kind is float:
        if isinstance(value, str):
            # YAML 1.1 reads exponent forms like 1.0e18 as strings
            try:
                value = float(value)
            except ValueError:
                raise _fail(f"expected a number, got {value!r}", path, lines) from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _fail(f"expected a number, got {value!r}", path, lines)
        value = float(value)
        if not math.isfinite(value):
            raise _fail("must be finite", path, lines)
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise _fail(f"expected an integer, got {value!r}", path, lines)
        return value
    if not isinstance(value, kind):
        raise _fail(f"expected {kind.__name__}, got {type(value).__name__}", path, lines)
    return value


@dataclass
class ScenarioConfig:
    gas: GasParams
    raw: dict
    source: str = "<string>"
    flux: FluxParams | None = None
    J: float | None = None
    J_cr: float | None = None
    schedule: LeakSchedule | None = None
    seed: int = 0
    output_path: str | None = None
    output_format: str = "csv"
    si: bool = False
    lines: dict = field(default_factory=dict, repr=False)

    def section(self, name: str) -> dict:
        return self.raw.get(name) or {}

    def error(self, msg: str, *path) -> ValidationError:
        return _fail(msg, tuple(path), self.lines)


def parse_config(text: str, si: bool = False, source: str = "<string>") -> ScenarioConfig:
    try:
        raw = yaml.safe_load(text)
        lines = _line_index(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"{source}: invalid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{source}: top level must be a mapping")

    for key, value in raw.items():
        if key not in SCHEMA:
            raise _fail("unknown key", (key,), lines)
        schema = SCHEMA[key]
        if isinstance(schema, dict):
            if value is None:
                raw[key] = value = {}
            if not isinstance(value, dict):
                raise _fail("expected a mapping", (key,), lines)
            for sub, v in value.items():
                if sub not in schema:
                    raise _fail("unknown key", (key, sub), lines)
                value[sub] = _coerce(v, schema[sub], (key, sub), lines)
        else:
            raw[key] = _coerce(value, schema, (key,), lines)

    for sec, keys in REQUIRED.items():
        if sec not in raw:
            raise _fail("missing section", (sec,), lines)
        for k in keys:
            if raw[sec].get(k) is None:
                raise _fail("missing required key", (sec, k), lines)

    g = dict(raw["gas"])
    if si:
        g["hbar"] = constants.hbar
    g = {k: v for k, v in g.items() if v is not None}
    try:
        gas = GasParams(**g)
    except ValidationError as exc:
        raise _fail(str(exc), ("gas",), lines) from None

    cfg = ScenarioConfig(gas=gas, raw=raw, source=source, si=si, lines=lines)
    cfg.seed = raw.get("seed") or 0
    if cfg.seed < 0:
        raise _fail("seed must be non-negative", ("seed",), lines)

    flux = raw.get("flux") or {}
    cfg.J_cr = flux.get("J_cr")
    if flux.get("J") is not None:
        if flux["J"] < 0:
            raise _fail("J must be >= 0", ("flux", "J"), lines)
        cfg.J = flux["J"]
    if flux.get("lambda") is not None:
        try:
            cfg.flux = FluxParams(flux["lambda"], flux.get("v_boundary") or 0.0, flux.get("env_volume") or math.inf)
        except ValidationError as exc:
            raise _fail(str(exc), ("flux",), lines) from None

    sched = raw.get("schedule")
    if sched:
        if cfg.J is None:
            raise _fail("an explicit flux.J is required for a schedule", ("flux", "J"), lines)
        t_grid = sched.get("t_grid")
        if not t_grid:
            raise _fail("missing required key", ("schedule", "t_grid"), lines)
        for t in t_grid:
            _coerce(t, float, ("schedule", "t_grid"), lines)
        try:
            cfg.schedule = LeakSchedule(
                J=cfg.J, t_grid=t_grid, N=sched.get("N") or gas.N, M_phi=sched.get("M_phi")
            )
        except ValidationError as exc:
            raise _fail(str(exc), ("schedule",), lines) from None

    out = raw.get("output") or {}
    cfg.output_path = out.get("path")
    cfg.output_format = out.get("format") or "csv"
    if cfg.output_format not in ("csv", "json"):
        raise _fail("format must be csv or json", ("output", "format"), lines)
    return cfg


def load_config(path: str | Path, si: bool = False) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, si=si, source=str(path))
