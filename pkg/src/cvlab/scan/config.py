"""Experiment configuration: schema, loading and grid expansion.

A configuration is one YAML (or JSON) document.  It is validated against
:data:`SCHEMA` before anything runs; unknown keys anywhere are rejected and
every offending key is reported.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from ..dynamics import DetuningDrive, FreezingSpec, OUKernel, SystemParams, ThermalBath
from ..errors import ConfigError, InvalidArgument
from ..gaussian import DEFAULT_DISPLACEMENT, SqueezeSpec
from ..integrator import IntegratorConfig

EXPERIMENTS = (
    "baseline-trajectories",
    "baseline-heatmap",
    "thermal-sweep",
    "freezing",
    "freezing-thermal",
    "revivals",
    "witness-scan",
    "beating",
    "locking",
    "locking-witness",
    "beating-thermal",
    "oracle-check",
)
GENERATORS = ("markov", "o0", "pseudomode")
NUMERIC_AXES = ("s_a", "s_b", "delta_AB", "delta_AE", "gamma", "n_bar", "delta0", "omega_mod")
GRID_AXES = NUMERIC_AXES + ("generator",)

_number = {"type": "number"}
_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}


def _obj(props: dict, required=()) -> dict:
    return {
        "type": "object",
        "properties": props,
        "additionalProperties": False,
        "required": list(required),
    }


_range = _obj({"start": _number, "stop": _number, "step": {"type": "number", "exclusiveMinimum": 0}},
              ("start", "stop", "step"))
_axis = {
    "oneOf": [
        {"type": "array", "items": {"type": ["number", "string"]}},
        _range,
    ]
}

SCHEMA = _obj(
    {
        "experiment": {"enum": list(EXPERIMENTS)},
        "generator": {"enum": list(GENERATORS)},
        "system": _obj({"kappa": {"type": "number", "exclusiveMinimum": 0},
                        "delta_AB": _number, "delta_AE": _number}),
        "kernel": _obj({"gamma": {"type": "number", "exclusiveMinimum": 0}, "Omega": _number}),
        "bath": _obj({"n_bar": {"type": "number", "minimum": 0}}),
        "input": _obj({"s_a": _number, "s_b": _number, "alpha": _complex, "beta": _complex}),
        "drive": _obj({"kind": {"enum": ["constant", "sinusoidal"]}, "delta0": _number,
                       "omega_mod": {"type": "number", "exclusiveMinimum": 0}}),
        "integrator": _obj({
            "rel_tol": {"type": "number", "exclusiveMinimum": 0},
            "abs_tol": {"type": "number", "exclusiveMinimum": 0},
            "horizon": {"type": "number", "exclusiveMinimum": 0},
            "sample_dt": {"type": "number", "exclusiveMinimum": 0},
            "max_step": {"type": "number", "exclusiveMinimum": 0},
            "stiff_fallback": {"type": "boolean"},
            "stiff_threshold": {"type": "integer", "minimum": 1},
        }),
        "grid": {
            "type": "object",
            "propertyNames": {"enum": list(GRID_AXES)},
            "additionalProperties": _axis,
        },
        "grid_mode": {"enum": ["product", "zip"]},
        "output": {"type": "string"},
        "options": _obj({
            "store_trajectories": {"type": "boolean"},
            "output_stride": {"type": "integer", "minimum": 1},
            "average_window": {"type": "number", "exclusiveMinimum": 0},
            "baseline": {"type": ["number", "string"]},
            "deviation_floor": {"type": "number", "minimum": 0},
            "deviation_window": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
            "freezing": _obj({"t_n": _number, "n": _number, "t_s": _number, "n_s": _number}),
            "witness_base_mean": {"type": "array", "items": _number, "minItems": 4, "maxItems": 4},
            "maxima_height": _number,
            "maxima_prominence": {"type": "number", "minimum": 0},
            "mirror_sign_symmetry": {"type": "boolean"},
            "oracle_seeds": {"type": "integer", "minimum": 1},
            "oracle_cutoff": {"type": "integer", "minimum": 2},
            "oracle_horizon": {"type": "number", "exclusiveMinimum": 0},
        }),
    },
    required=("experiment",),
)

DEFAULT_OPTIONS = {
    "store_trajectories": True,
    "output_stride": 1,
    "average_window": None,
    "baseline": None,
    "deviation_floor": 0.01,
    "deviation_window": None,
    "freezing": {},
    "witness_base_mean": None,
    "maxima_height": 0.9,
    "maxima_prominence": 0.1,
    "mirror_sign_symmetry": True,
    "oracle_seeds": 20,
    "oracle_cutoff": None,
    "oracle_horizon": 4.0,
}


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def expand_axis(name: str, spec) -> list:
    """Explicit list of values for one grid axis (ranges include ``stop``)."""
    if isinstance(spec, dict):
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigError([f"grid.{name}: empty range"])
        # rounding keeps printed coordinates stable (0.05 steps, not 0.15000000000000002)
        return [float(np.round(start + k * step, 12)) for k in range(count)]
    values = list(spec)
    if name == "generator":
        bad = [v for v in values if v not in GENERATORS]
        if bad:
            raise ConfigError([f"grid.generator: unknown generator(s) {bad}"])
        return values
    if any(isinstance(v, str) for v in values):
        raise ConfigError([f"grid.{name}: values must be numbers"])
    return [float(v) for v in values]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (see the manual for every key)."""

    experiment: str
    generator: str
    system: SystemParams
    kernel: OUKernel
    bath: ThermalBath
    input: SqueezeSpec
    integrator: IntegratorConfig
    grid: dict
    grid_mode: str
    output: str | None
    options: dict
    raw: dict = field(repr=False, compare=False)

    @property
    def axes(self) -> tuple:
        return tuple(self.grid)

    def points(self) -> list[dict]:
        """Grid points in canonical order (first axis varies slowest)."""
        names = list(self.grid)
        if not names:
            return [{}]
        columns = [self.grid[n] for n in names]
        if self.grid_mode == "zip":
            if len({len(c) for c in columns}) != 1:
                raise ConfigError(["grid: zip mode needs axes of equal length"])
            combos = zip(*columns)
        else:
            combos = itertools.product(*columns)
        return [dict(zip(names, c)) for c in combos]

    def freezing_spec(self) -> FreezingSpec:
        return FreezingSpec(**{k: float(v) for k, v in self.options["freezing"].items()})


def validate(doc) -> list[str]:
    """All schema problems of ``doc`` as ``path: message`` strings."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    problems = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.path))):
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            for key in extra:
                problems.append(f"{path + '.' if path != '<root>' else ''}{key}: unknown key")
        elif err.validator == "propertyNames":
            problems.append(f"{path}: unknown grid axis {err.instance!r}")
        else:
            problems.append(f"{path}: {err.message}")
    return problems


def from_dict(doc: dict) -> ExperimentConfig:
    """Validate and build an :class:`ExperimentConfig`.

    Raises:
        ConfigError: listing every offending key.
    """
    if not isinstance(doc, dict):
        raise ConfigError(["<root>: configuration must be a mapping"])
    problems = validate(doc)
    if problems:
        raise ConfigError(problems)
    raw = copy.deepcopy(doc)
    try:
        sysd = doc.get("system", {})
        drive_d = doc.get("drive")
        if drive_d is not None:
            drive = DetuningDrive(drive_d.get("kind", "constant"),
                                  float(drive_d.get("delta0", sysd.get("delta_AB", 0.0))),
                                  float(drive_d.get("omega_mod", 1.0)))
        else:
            drive = DetuningDrive("constant", float(sysd.get("delta_AB", 0.0)))
        system = SystemParams(float(sysd.get("kappa", 1.0)), drive, float(sysd.get("delta_AE", 0.0)))
        kd = doc.get("kernel", {})
        kernel = OUKernel(float(kd.get("gamma", 1.0)), float(kd.get("Omega", 0.0)))
        bath = ThermalBath(float(doc.get("bath", {}).get("n_bar", 0.0)))
        ind = doc.get("input", {})
        spec = SqueezeSpec(
            float(ind.get("s_a", 1.0)),
            float(ind.get("s_b", 1.0)),
            _as_complex(ind.get("alpha", [DEFAULT_DISPLACEMENT.real, DEFAULT_DISPLACEMENT.imag])),
            _as_complex(ind.get("beta", [DEFAULT_DISPLACEMENT.real, DEFAULT_DISPLACEMENT.imag])),
        )
        icfg = IntegratorConfig(**doc.get("integrator", {}))
        grid = {name: expand_axis(name, ax) for name, ax in doc.get("grid", {}).items()}
        options = {**DEFAULT_OPTIONS, **doc.get("options", {})}
        cfg = ExperimentConfig(
            experiment=doc["experiment"],
            generator=doc.get("generator", "markov"),
            system=system,
            kernel=kernel,
            bath=bath,
            input=spec,
            integrator=icfg,
            grid=grid,
            grid_mode=doc.get("grid_mode", "product"),
            output=doc.get("output"),
            options=options,
            raw=raw,
        )
        cfg.points()
        if options["freezing"]:
            cfg.freezing_spec()
    except InvalidArgument as exc:
        raise ConfigError([str(exc)]) from exc
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a configuration file.

    Raises:
        ConfigError: unreadable file, malformed YAML or schema violations.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"]) from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: malformed YAML ({exc})"]) from exc
    return from_dict(doc)
