"""Experiment configuration: JSON documents validated against the shipped schema."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from ..blocks import BlockSchedule
from ..errors import FocklabError
from ..numint import AdaptiveSpec
from ..weyl import PhaseSpaceGrid

EXPERIMENTS = ("hs-identity", "block-decay", "bridge", "berezin", "star", "offdiag",
               "counterexample", "bounds-ledger", "invariants")


class ConfigError(FocklabError):
    """Malformed or schema-violating configuration (exit status 2)."""


def load_schema() -> dict:
    text = resources.files(__package__).joinpath("config_schema.json").read_text()
    return json.loads(text)


def _fill_defaults(schema: dict, doc: dict) -> dict:
    out = copy.deepcopy(doc)
    for key, sub in schema.get("properties", {}).items():
        if sub.get("type") == "object":
            out[key] = _fill_defaults(sub, out.get(key, {}))
        elif key not in out and "default" in sub:
            out[key] = copy.deepcopy(sub["default"])
    return out


def defaults() -> dict:
    return _fill_defaults(load_schema(), {})


@dataclass(frozen=True)
class ExperimentConfig:
    data: dict

    def __getitem__(self, key):
        return self.data[key]

    @property
    def experiment(self) -> str | None:
        return self.data.get("experiment")

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def n(self) -> int:
        return self.data["n"]

    def schedule(self, **overrides) -> BlockSchedule:
        s = dict(self.data["schedule"])
        s.update(overrides)
        return BlockSchedule(mode=s["mode"], M=s["M"], r0=s["r0"], R_cap=s["R_cap"], s=s["s"],
                             n=self.n)

    def quadrature(self) -> AdaptiveSpec:
        return AdaptiveSpec(**self.data["quadrature"])

    def grids(self) -> list:
        g = self.data["grid"]
        out = [PhaseSpaceGrid(g["L"], g["samples"])]
        for _ in range(g["levels"] - 1):
            out.append(out[-1].refined())
        return out


def parse_config(doc: dict, experiment: str | None = None, seed: int | None = None) -> ExperimentConfig:
    schema = load_schema()
    doc = dict(doc)
    if seed is not None:
        doc["seed"] = int(seed)
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from None
    data = _fill_defaults(schema, doc)
    if experiment is not None:
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if data.get("experiment") not in (None, experiment):
            raise ConfigError(f"config names experiment {data['experiment']!r} but {experiment!r} was requested")
        data["experiment"] = experiment
    return ExperimentConfig(data)


def load_config(path, experiment: str | None = None, seed: int | None = None) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return parse_config(doc, experiment, seed)
