"""Run configuration: JSON schema, dataclasses and conversion to model objects."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import jsonschema
import numpy as np

from .model_catalog import (
    LAWS,
    BoundaryCondition,
    Coefficients,
    CouplingPattern,
    ModelSpec,
    PhysicalParams,
    PronyKernel,
    derive_coefficients,
)
from .time_integration import IntegratorConfig, Scheme


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


_NUMBER = {"type": "number"}
_KERNEL = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
}
_LAW_PARAMS = {
    "Fourier": {"varpi": _NUMBER},
    "Cattaneo": {"tau": _NUMBER, "varpi": _NUMBER},
    "GurtinPipkin": {"kernel": _KERNEL, "varpi": _NUMBER},
    "ColemanGurtin": {"varpi": _NUMBER, "kernel": _KERNEL},
    "GreenNaghdiIII": {"beta": _NUMBER, "varpi": _NUMBER},
    "TzouDPL": {"tau_q": _NUMBER, "tau_theta": _NUMBER, "varpi": _NUMBER},
    "LordShulman": {"tau": _NUMBER, "varpi": _NUMBER},
    "TypeIIIMemory": {"beta": _NUMBER, "varpi": _NUMBER, "kernel": _KERNEL},
}
_LAW_REQUIRED = {
    "Fourier": [],
    "Cattaneo": ["tau"],
    "GurtinPipkin": ["kernel"],
    "ColemanGurtin": ["varpi", "kernel"],
    "GreenNaghdiIII": ["beta", "varpi"],
    "TzouDPL": ["tau_q", "tau_theta"],
    "LordShulman": ["tau"],
    "TypeIIIMemory": ["beta", "varpi", "kernel"],
}


def _closed(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


def _law_schema(name: str) -> dict:
    props = {"name": {"const": name}, **_LAW_PARAMS[name]}
    return _closed(props, ["name", *_LAW_REQUIRED[name]])


def _dispatch(key: str, value: str, schema: dict) -> dict:
    return {"if": {"type": "object", "properties": {key: {"const": value}}, "required": [key]}, "then": schema}


_REDUCED = [f.name for f in fields(Coefficients)]
_PHYSICAL = [f.name for f in fields(PhysicalParams)]

SCHEMA = _closed(
    {
        "model": _closed(
            {
                "coupling": {"enum": [p.name for p in CouplingPattern]},
                "law": {
                    "type": ["object", "null"],
                    "required": ["name"],
                    "properties": {"name": {"enum": list(LAWS)}},
                    # dispatch on the name so errors point at the offending parameter
                    "allOf": [_dispatch("name", n, _law_schema(n)) for n in LAWS],
                },
                "coefficients": {
                    "type": "object",
                    "minProperties": 1,
                    "maxProperties": 1,
                    "properties": {
                        "reduced": _closed({k: _NUMBER for k in _REDUCED}, _REDUCED),
                        "physical": _closed({k: _NUMBER for k in _PHYSICAL}, _PHYSICAL),
                    },
                    "additionalProperties": False,
                },
            },
            ["coupling", "coefficients"],
        ),
        "grid": _closed({"L": _NUMBER, "N": {"type": "integer"}}, ["N"]),
        "bc": {"enum": [b.name for b in BoundaryCondition]},
        "integrator": _closed(
            {
                "scheme": {"enum": [s.name for s in Scheme]},
                "dt": _NUMBER,
                "T": _NUMBER,
                "stride": {"type": "integer"},
                "tol": _NUMBER,
            },
            ["dt", "T"],
        ),
        "initial": _closed(
            {
                "type": {"enum": ["zero", "sine"]},
                "modes": {
                    "type": "array",
                    "items": _closed(
                        {
                            "field": {"type": "string"},
                            "mode": {"type": "integer", "minimum": 1},
                            "amplitude": _NUMBER,
                        },
                        ["field", "mode", "amplitude"],
                    ),
                },
            },
            ["type"],
        ),
        "output": _closed(
            {
                "directory": {"type": "string"},
                "energy": {"type": "boolean"},
                "trajectory": {"type": "boolean"},
            }
        ),
    },
    ["model", "grid", "integrator", "initial"],
)


@dataclass(frozen=True)
class SineMode:
    field: str
    mode: int
    amplitude: float


@dataclass(frozen=True)
class RunConfig:
    coupling: str
    coefficients: dict
    coefficient_kind: str  # "reduced" | "physical"
    N: int
    law: dict | None = None
    L: float = 1.0
    bc: str = "FullDirichlet"
    scheme: str = "ImplicitMidpoint"
    dt: float = 1e-3
    T: float = 1.0
    stride: int = 1
    tol: float = 1e-12
    initial: str = "zero"
    modes: tuple[SineMode, ...] = ()
    directory: str = "output"
    write_energy: bool = True
    write_trajectory: bool = False

    # -- serialization ----------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config field {where}: {exc.message}") from None
        model = data["model"]
        (kind, coefs), = model["coefficients"].items()
        grid, integ = data["grid"], data["integrator"]
        init, out = data["initial"], data.get("output", {})
        law = model.get("law")
        return cls(
            coupling=model["coupling"],
            coefficients=dict(coefs),
            coefficient_kind=kind,
            N=grid["N"],
            law=None if law is None else json.loads(json.dumps(law)),
            L=grid.get("L", 1.0),
            bc=data.get("bc", "FullDirichlet"),
            scheme=integ.get("scheme", "ImplicitMidpoint"),
            dt=integ["dt"],
            T=integ["T"],
            stride=integ.get("stride", 1),
            tol=integ.get("tol", 1e-12),
            initial=init["type"],
            modes=tuple(SineMode(**m) for m in init.get("modes", ())),
            directory=out.get("directory", "output"),
            write_energy=out.get("energy", True),
            write_trajectory=out.get("trajectory", False),
        )

    def to_dict(self) -> dict:
        model = {"coupling": self.coupling, "coefficients": {self.coefficient_kind: dict(self.coefficients)}}
        if self.law is not None:
            model["law"] = self.law
        init = {"type": self.initial}
        if self.modes:
            init["modes"] = [asdict(m) for m in self.modes]
        return {
            "model": model,
            "grid": {"L": self.L, "N": self.N},
            "bc": self.bc,
            "integrator": {"scheme": self.scheme, "dt": self.dt, "T": self.T, "stride": self.stride, "tol": self.tol},
            "initial": init,
            "output": {
                "directory": self.directory,
                "energy": self.write_energy,
                "trajectory": self.write_trajectory,
            },
        }

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        return cls.from_dict(data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    # -- model objects ----------------------------------------------------

    def build_coefficients(self) -> Coefficients:
        try:
            if self.coefficient_kind == "reduced":
                return Coefficients(**self.coefficients)
            return derive_coefficients(PhysicalParams(**self.coefficients))
        except ValueError as exc:
            raise ConfigError(f"model.coefficients: {exc}") from None

    def build_law(self):
        if self.law is None:
            return None
        params = dict(self.law)
        cls = LAWS[params.pop("name")]
        if "kernel" in params:
            try:
                params["kernel"] = PronyKernel(tuple(tuple(m) for m in params["kernel"]))
            except ValueError as exc:
                raise ConfigError(f"model.law.kernel: {exc}") from None
        try:
            return cls(**params)
        except ValueError as exc:
            raise ConfigError(f"model.law: {exc}") from None

    def build_spec(self) -> ModelSpec:
        coefs = self.build_coefficients()
        law = self.build_law()
        try:
            return ModelSpec(coefs, CouplingPattern[self.coupling], law, bc=BoundaryCondition[self.bc], L=self.L)
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from None

    def build_integrator(self) -> IntegratorConfig:
        try:
            return IntegratorConfig(dt=self.dt, T=self.T, scheme=Scheme[self.scheme], stride=self.stride, tol=self.tol)
        except ValueError as exc:
            raise ConfigError(f"integrator: {exc}") from None


def initial_state(cfg: RunConfig, sys):
    """Sine-mode initial data ``amplitude * sin(mode pi x / L)`` on the named slots."""
    u = sys.zeros()
    if cfg.initial == "zero":
        return u
    for m in cfg.modes:
        if m.field not in sys.layout:
            raise ConfigError(
                f"initial.modes: unknown field {m.field!r}; available: {', '.join(sys.layout)}"
            )
        x = sys.coordinates(m.field)
        u[sys.layout[m.field]] += m.amplitude * np.sin(m.mode * np.pi * x / sys.grid.L)
    return u


__all__ = ["RunConfig", "SineMode", "ConfigError", "SCHEMA", "initial_state"]
