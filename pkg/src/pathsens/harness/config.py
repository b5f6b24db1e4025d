"""Experiment configuration: YAML schema, defaults, presets and validation.

Every key is documented in the README. Values are interpreted in the model's
own units: reduced LJ units for ``lj-fluid``, ``ou-oracle`` and
``free-particle``; kelvin, femtoseconds, Angstrom and inverse picoseconds
for ``methane``.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import yaml

from ..errors import ConfigurationError

MODELS = ("lj-fluid", "methane", "ou-oracle", "free-particle")
PRESETS = ("lj-paper", "methane-paper", "lj-desk")

# (type, default); a default of REQUIRED must be supplied
REQUIRED = object()
SCHEMA = {
    "model": (str, REQUIRED),
    "system": {
        "n_atoms": (int, None),
        "n_molecules": (int, None),
        "density": (float, None),
        "box": (float, None),
        "temperature": (float, REQUIRED),
        "r_cut": (float, None),
        "mass": (float, 1.0),
    },
    "dynamics": {
        "dt": (float, REQUIRED),
        "n_steps": (int, REQUIRED),
        "n_equil": (int, 0),
        "gamma": (float, 1.0),
        "seed": (int, 0),
        "alpha": (float, 0.0),
    },
    "parameters": (dict, {}),
    "perturbations": (list, []),
    "sensitivity": {
        "stride": (int, 10),
        "rcut_stride": (int, 100),
        "fim": (bool, True),
        "discrete": (bool, False),
        "normalization": (str, "particle"),
        "n_blocks": (int, 20),
        "rcut_list": (list, []),
    },
    "observables": {
        "mode": (str, None),
        "rdf_bin": (float, None),
        "rdf_stride": (int, 100),
        "msd_stride": (int, 100),
        "msd_origin_stride": (int, 10),
        "msd_max_lag": (int, None),
        "pressure_stride": (int, 10),
    },
    "outputs": {
        "directory": (str, "results"),
        "trajectory_stride": (int, 0),
        "progress_every": (int, 0),
    },
    "replicas": (int, 1),
}


def _validate(node, schema, path):
    if not isinstance(node, dict):
        raise ConfigurationError("expected a mapping", path or "<root>")
    out = {}
    for key in node:
        if key not in schema:
            raise ConfigurationError(f"unknown key (allowed: {sorted(schema)})", _join(path, key))
    for key, spec in schema.items():
        where = _join(path, key)
        if isinstance(spec, dict):
            out[key] = _validate(node.get(key) or {}, spec, where)
            continue
        typ, default = spec
        if key not in node or node[key] is None:
            if default is REQUIRED:
                raise ConfigurationError("required field is missing", where)
            out[key] = copy.deepcopy(default)
            continue
        out[key] = _coerce(node[key], typ, where)
    return out


def _join(path, key):
    return f"{path}.{key}" if path else key


def _coerce(value, typ, where):
    if typ is bool:
        if isinstance(value, bool):
            return value
        raise ConfigurationError(f"expected true/false, got {value!r}", where)
    if typ is int:
        if isinstance(value, bool):
            raise ConfigurationError(f"expected an integer, got {value!r}", where)
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if isinstance(value, int):
            return value
        if isinstance(value, str):
            try:
                f = float(value)
            except ValueError:
                pass
            else:
                if f.is_integer():
                    return int(f)
        raise ConfigurationError(f"expected an integer, got {value!r}", where)
    if typ is float:
        if isinstance(value, bool):
            raise ConfigurationError(f"expected a number, got {value!r}", where)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"expected a number, got {value!r}", where) from None
    if typ is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"expected a string, got {value!r}", where)
        return value
    if not isinstance(value, typ):
        raise ConfigurationError(f"expected a {typ.__name__}, got {type(value).__name__}", where)
    return copy.deepcopy(value)


@dataclass
class ExperimentConfig:
    """Validated, fully defaulted experiment description."""

    data: dict

    def __getitem__(self, key):
        return self.data[key]

    @property
    def model(self) -> str:
        return self.data["model"]

    @property
    def seed(self) -> int:
        return self.data["dynamics"]["seed"]

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        return load_config(deep_merge(self.data, overrides))

    def canonical(self) -> str:
        # where results are written does not change them
        data = copy.deepcopy(self.data)
        data["outputs"].pop("directory", None)
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def provenance(self) -> dict:
        from .. import __version__

        return {"config_hash": self.hash(), "model": self.model, "seed": self.seed,
                "code_version": __version__}


def deep_merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "parameters":
            out[k] = deep_merge(out[k], v)
        elif isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = {**out[k], **v}
        else:
            out[k] = copy.deepcopy(v)
    return out


def _check_semantics(d: dict) -> None:
    model = d["model"]
    if model not in MODELS:
        raise ConfigurationError(f"unknown model {model!r}; choose from {MODELS}", "model")
    s, dyn = d["system"], d["dynamics"]
    if model == "methane":
        if not s["n_molecules"]:
            raise ConfigurationError("required for methane", "system.n_molecules")
    elif not s["n_atoms"]:
        raise ConfigurationError("required field is missing", "system.n_atoms")
    if s["density"] is None and s["box"] is None:
        raise ConfigurationError("give either density or box", "system.density")
    for key in ("density", "box", "r_cut", "mass"):
        if s[key] is not None and s[key] <= 0:
            raise ConfigurationError("must be positive", f"system.{key}")
    if s["temperature"] <= 0:
        raise ConfigurationError("must be positive", "system.temperature")
    if dyn["dt"] <= 0:
        raise ConfigurationError("must be positive", "dynamics.dt")
    if dyn["gamma"] < 0:
        raise ConfigurationError("must be non-negative", "dynamics.gamma")
    for key in ("n_steps", "n_equil"):
        if dyn[key] < 0:
            raise ConfigurationError("must be non-negative", f"dynamics.{key}")
    for key in ("stride", "rcut_stride", "n_blocks"):
        if d["sensitivity"][key] < 1:
            raise ConfigurationError("must be >= 1", f"sensitivity.{key}")
    if d["replicas"] < 1:
        raise ConfigurationError("must be >= 1", "replicas")
    mode = d["observables"]["mode"]
    if mode is not None and mode not in ("atomic", "molecular"):
        raise ConfigurationError("must be atomic or molecular", "observables.mode")
    for i, p in enumerate(d["perturbations"]):
        normalize_perturbation(p, f"perturbations[{i}]")


def normalize_perturbation(p, where="perturbations"):
    """Accept ``"name:+5%"`` strings or {parameter, magnitude, signs} mappings.

    Returns a list of (name, signed value) pairs.
    """
    from ..sensitivity.directions import parse_perturbation

    if isinstance(p, str):
        try:
            return parse_perturbation(p)
        except ConfigurationError as exc:
            raise ConfigurationError(str(exc).split(": ", 1)[-1], where) from None
    if not isinstance(p, dict):
        raise ConfigurationError("expected a string or mapping", where)
    unknown = set(p) - {"parameter", "magnitude", "signs"}
    if unknown:
        raise ConfigurationError(f"unknown keys {sorted(unknown)}", where)
    if "parameter" not in p:
        raise ConfigurationError("required field is missing", f"{where}.parameter")
    name = p["parameter"]
    mag = _coerce(p.get("magnitude", 0.05), float, f"{where}.magnitude")
    if name == "rcut":
        return [("rcut", mag)]
    if mag <= -1.0:
        raise ConfigurationError("relative magnitude must exceed -100%", f"{where}.magnitude")
    signs = p.get("signs", ["+", "-"])
    if isinstance(signs, str):
        signs = [signs]
    out = []
    for s in signs:
        if s not in ("+", "-"):
            raise ConfigurationError(f"sign must be + or -, got {s!r}", f"{where}.signs")
        out.append((name, mag if s == "+" else -mag))
    return out


def load_config(data) -> ExperimentConfig:
    d = _validate(data or {}, SCHEMA, "")
    _check_semantics(d)
    return ExperimentConfig(d)


def read_yaml(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}", "--config") from None
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"invalid YAML: {exc}", "--config") from None
    return data or {}


def preset_data(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {PRESETS}", "--preset")
    text = resources.files("pathsens.harness").joinpath("presets", f"{name}.yaml").read_text()
    return yaml.safe_load(text)


def load_preset(name: str, overrides: dict | None = None) -> ExperimentConfig:
    return load_config(deep_merge(preset_data(name), overrides or {}))
