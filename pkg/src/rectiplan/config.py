"""Run configuration: JSON schema, defaults and conversion to problem specs."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .analysis import FilterConfig
from .discretization import TimeGrid, build_grid, line_templates, load_templates_csv, single_phase_template
from .errors import ConfigInvalid
from .single_phase import SinglePhaseSpec
from .three_phase import ThreePhaseSpec

OUT_ENV = "RECTIPLAN_OUT"

_harmonic = {"type": "integer", "minimum": 0}
SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["phase", "n"],
    "properties": {
        "phase": {"enum": ["single", "three"]},
        "n": {"type": "integer", "minimum": 4},
        "free_wheel": {"type": "boolean"},
        "dc_target": {"type": "number"},
        "dc_interval": {"type": ["array", "null"], "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "lambda": {"type": "number", "minimum": 0},
        "current_zero_harmonics": {"type": "array", "items": _harmonic},
        "voltage_harmonics": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["k"],
                "properties": {"k": _harmonic, "re": {"type": "number"}, "im": {"type": "number"}},
            },
        },
        "f0_hz": {"type": "number", "exclusiveMinimum": 0},
        "load_current": {"type": "number", "exclusiveMinimum": 0},
        "filter": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "r_ohms": {"type": "number", "exclusiveMinimum": 0},
                "l_henries": {"type": "number", "exclusiveMinimum": 0},
                "settle_periods": {"type": "integer", "minimum": 1},
            },
        },
        "templates_file": {"type": ["string", "null"]},
        "quantize": {"type": "boolean"},
        "output_dir": {"type": "string"},
        "current_zero_mean": {"type": "boolean"},
        "literal_currents": {"type": "boolean"},
        "current_harmonic_mode": {"enum": ["per_phase", "aggregate"]},
    },
}


@dataclass(frozen=True)
class RunConfig:
    phase: str
    n: int
    free_wheel: bool = True
    dc_target: float = 0.0
    dc_interval: tuple | None = None
    lam: float = 0.0
    current_zero_harmonics: tuple = ()
    voltage_harmonics: tuple = ()  # ((k, re, im), ...)
    f0_hz: float = 50.0
    load_current: float = 1.0
    filter: FilterConfig = field(default_factory=FilterConfig)
    templates_file: Path | None = None
    quantize: bool = True
    output_dir: Path = Path("out")
    current_zero_mean: bool = False
    literal_currents: bool = False
    current_harmonic_mode: str = "per_phase"

    def grid(self) -> TimeGrid:
        return build_grid(self.n, self.f0_hz)

    def spec(self):
        common = dict(
            N=self.n,
            free_wheel=self.free_wheel,
            dc_target=self.dc_target,
            lam=self.lam,
            current_zero_harmonics=self.current_zero_harmonics,
            voltage_harmonic_bindings={k: (re, im) for k, re, im in self.voltage_harmonics},
            dc_interval=self.dc_interval,
            current_zero_mean=self.current_zero_mean,
        )
        if self.phase == "single":
            return SinglePhaseSpec(**common)
        return ThreePhaseSpec(**common, literal_currents=self.literal_currents,
                              current_harmonic_mode=self.current_harmonic_mode)

    def templates(self, grid: TimeGrid):
        count = 1 if self.phase == "single" else 3
        if self.templates_file is not None:
            return tuple(load_templates_csv(self.templates_file, grid.N, count))
        return (single_phase_template(grid),) if count == 1 else line_templates(grid)


def parse_config(doc: dict, base_dir: Path | None = None) -> RunConfig:
    """Validate a config mapping; unknown keys are rejected."""
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigInvalid(f"{where}: {e.message}")
    if doc.get("current_zero_mean") and doc["phase"] == "three":
        raise ConfigInvalid("current_zero_mean: three-phase currents are always zero-mean")
    for key in ("literal_currents", "current_harmonic_mode"):
        if key in doc and doc["phase"] == "single":
            raise ConfigInvalid(f"{key}: only meaningful for phase 'three'")
    filt = doc.get("filter", {})
    tfile = doc.get("templates_file")
    if tfile is not None:
        tfile = Path(tfile)
        if base_dir is not None and not tfile.is_absolute():
            tfile = base_dir / tfile
    out = Path(os.environ.get(OUT_ENV) or doc.get("output_dir", "out"))
    try:
        cfg = RunConfig(
            phase=doc["phase"],
            n=doc["n"],
            free_wheel=doc.get("free_wheel", True),
            dc_target=float(doc.get("dc_target", 0.0)),
            dc_interval=tuple(doc["dc_interval"]) if doc.get("dc_interval") else None,
            lam=float(doc.get("lambda", 0.0)),
            current_zero_harmonics=tuple(doc.get("current_zero_harmonics", ())),
            voltage_harmonics=tuple((h["k"], float(h.get("re", 0.0)), float(h.get("im", 0.0)))
                                    for h in doc.get("voltage_harmonics", ())),
            f0_hz=float(doc.get("f0_hz", 50.0)),
            load_current=float(doc.get("load_current", 1.0)),
            filter=FilterConfig(
                r_ohms=float(filt.get("r_ohms", 1.0)),
                l_henries=float(filt.get("l_henries", 0.02)),
                f0_hz=float(doc.get("f0_hz", 50.0)),
                settle_periods=int(filt.get("settle_periods", 10)),
            ),
            templates_file=tfile,
            quantize=doc.get("quantize", True),
            output_dir=out,
            current_zero_mean=doc.get("current_zero_mean", False),
            literal_currents=doc.get("literal_currents", False),
            current_harmonic_mode=doc.get("current_harmonic_mode", "per_phase"),
        )
        cfg.spec()
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise ConfigInvalid(f"{path}: top level must be a JSON object")
    return parse_config(doc, path.parent)


_FIG = {"lambda": 10.0, "voltage_harmonics": [{"k": 2}, {"k": 4}, {"k": 6}]}
PRESETS = {
    "fig5": {"phase": "single", "n": 128, "free_wheel": True, "dc_target": 0.2, **_FIG},
    "fig6": {"phase": "single", "n": 128, "free_wheel": False, "dc_target": 0.2, **_FIG},
    "fig7": {"phase": "three", "n": 192, "free_wheel": False, "dc_target": 0.8, **_FIG},
    "fig8": {"phase": "three", "n": 192, "free_wheel": True, "dc_target": 0.8, **_FIG},
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigInvalid(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    doc = json.loads(json.dumps(PRESETS[name]))
    doc["output_dir"] = f"out/{name}"
    return doc
